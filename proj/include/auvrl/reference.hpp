#ifndef AUVRL_REFERENCE_HPP_
#define AUVRL_REFERENCE_HPP_

#include <optional>
#include <vector>

#include "auvrl/random.hpp"
#include "auvrl/so3.hpp"

namespace auvrl {

// Curve whose velocity is v(t) = [a, b sin(w t + phase), c cos(w t + phase)].
// The desired attitude is its Frenet-Serret frame.
struct TrajectoryParams {
  double a = 0.5;          // m/s
  double b = 0.5;          // m/s
  double c = 0.3;          // m/s
  double frequency = 0.2;  // rad/s
  double phase = 0.0;      // rad

  void Validate() const;
};

struct ReferenceState {
  Vec3 v_d = Vec3::Zero();  // desired body linear velocity
  Quat q_d;                 // desired attitude
};

// Orthonormal tangent / normal / binormal triple.
struct FrenetFrame {
  Vec3 tangent;
  Vec3 normal;
  Vec3 binormal;
  bool degenerate = false;  // curvature below 1e-8, normal carried over

  Mat3 Matrix() const;  // columns [T N B]
};

// Frame at time t. When the curvature vanishes the normal is taken from
// `previous_normal` (projected onto the plane orthogonal to T), or from a
// fixed world axis when there is no history.
FrenetFrame ComputeFrenetFrame(const TrajectoryParams& tp, double t,
                               const std::optional<Vec3>& previous_normal = {});

// Attitude whose body x, y, z axes are T, N, B.
Quat FrenetAttitude(const TrajectoryParams& tp, double t);

// Stateful evaluator that carries the last normal across degenerate
// stretches of the curve.
class FrenetAttitudeTrack {
 public:
  FrenetAttitudeTrack() = default;
  explicit FrenetAttitudeTrack(const TrajectoryParams& tp) : tp_(tp) {}

  Quat At(double t);
  const TrajectoryParams& params() const { return tp_; }

 private:
  TrajectoryParams tp_;
  std::optional<Vec3> last_normal_;
};

// Norm V_d * uniform direction on the sphere.
Vec3 SampleVelocityReference(Rng& rng, double speed = 0.5);

// Random draw that fixes one training episode's references: the constant
// body velocity, a random phase and a constant attitude pre-rotation
// applied to the Frenet frame.
struct EpisodeReference {
  Vec3 v_d = Vec3::Zero();
  TrajectoryParams trajectory;
  Quat pre_rotation;
};

EpisodeReference SampleEpisodeReference(Rng& rng, const TrajectoryParams& base,
                                        double speed = 0.5);

// Desired attitude of an episode at time t.
Quat EpisodeAttitude(const EpisodeReference& ref, FrenetAttitudeTrack& track,
                     double t);

// Full reference schedule, entry k at time k * dt.
std::vector<ReferenceState> EpisodeReferences(Rng& rng,
                                              const TrajectoryParams& base,
                                              int horizon, double dt,
                                              double speed = 0.5);

}  // namespace auvrl

#endif  // AUVRL_REFERENCE_HPP_
