#include "auvrl/reference.hpp"

#include <cmath>
#include <numbers>

#include "auvrl/errors.hpp"

namespace auvrl {

void TrajectoryParams::Validate() const {
  if (!(a > 0.0)) throw InvalidArgument("trajectory coefficient a must be > 0");
  if (!(frequency > 0.0)) {
    throw InvalidArgument("trajectory frequency must be > 0");
  }
  if (!std::isfinite(b) || !std::isfinite(c) || !std::isfinite(phase)) {
    throw InvalidArgument("trajectory parameters must be finite");
  }
}

Mat3 FrenetFrame::Matrix() const {
  Mat3 m;
  m.col(0) = tangent;
  m.col(1) = normal;
  m.col(2) = binormal;
  return m;
}

namespace {

constexpr double kCurvatureEps = 1e-8;

Vec3 FallbackNormal(const Vec3& tangent) {
  Vec3 axis = Vec3::UnitY();
  if (std::abs(tangent.dot(axis)) > 0.9) axis = Vec3::UnitZ();
  return (axis - tangent * tangent.dot(axis)).normalized();
}

}  // namespace

FrenetFrame ComputeFrenetFrame(const TrajectoryParams& tp, double t,
                               const std::optional<Vec3>& previous_normal) {
  tp.Validate();
  const double arg = tp.frequency * t + tp.phase;
  const Vec3 vel(tp.a, tp.b * std::sin(arg), tp.c * std::cos(arg));
  const Vec3 acc(0.0, tp.b * tp.frequency * std::cos(arg),
                 -tp.c * tp.frequency * std::sin(arg));
  const double speed = vel.norm();

  FrenetFrame f;
  f.tangent = vel / speed;
  // dT/dt = (v' - T (T . v')) / |v|
  const Vec3 tangent_rate = (acc - f.tangent * f.tangent.dot(acc)) / speed;
  const double rate = tangent_rate.norm();
  if (rate >= kCurvatureEps) {
    f.normal = tangent_rate / rate;
  } else {
    f.degenerate = true;
    Vec3 n = previous_normal.value_or(FallbackNormal(f.tangent));
    n -= f.tangent * f.tangent.dot(n);
    f.normal = n.norm() > 1e-12 ? Vec3(n.normalized()) : FallbackNormal(f.tangent);
  }
  f.binormal = f.tangent.cross(f.normal);
  return f;
}

Quat FrenetAttitude(const TrajectoryParams& tp, double t) {
  return QuatFromRotationMatrix(ComputeFrenetFrame(tp, t).Matrix());
}

Quat FrenetAttitudeTrack::At(double t) {
  const FrenetFrame f = ComputeFrenetFrame(tp_, t, last_normal_);
  last_normal_ = f.normal;
  return QuatFromRotationMatrix(f.Matrix());
}

Vec3 SampleVelocityReference(Rng& rng, double speed) {
  return speed * UniformUnitVector(rng);
}

EpisodeReference SampleEpisodeReference(Rng& rng, const TrajectoryParams& base,
                                        double speed) {
  base.Validate();
  EpisodeReference ref;
  ref.v_d = SampleVelocityReference(rng, speed);
  ref.trajectory = base;
  ref.trajectory.phase = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
  ref.pre_rotation = UniformRotation(rng);
  return ref;
}

Quat EpisodeAttitude(const EpisodeReference& ref, FrenetAttitudeTrack& track,
                     double t) {
  return HamiltonProduct(ref.pre_rotation, track.At(t));
}

std::vector<ReferenceState> EpisodeReferences(Rng& rng,
                                              const TrajectoryParams& base,
                                              int horizon, double dt,
                                              double speed) {
  if (horizon < 1) throw InvalidArgument("EpisodeReferences: horizon < 1");
  if (!(dt > 0.0)) throw InvalidArgument("EpisodeReferences: dt must be > 0");
  const EpisodeReference ref = SampleEpisodeReference(rng, base, speed);
  FrenetAttitudeTrack track(ref.trajectory);
  std::vector<ReferenceState> out;
  out.reserve(horizon);
  for (int k = 0; k < horizon; ++k) {
    out.push_back({ref.v_d, EpisodeAttitude(ref, track, k * dt)});
  }
  return out;
}

}  // namespace auvrl
