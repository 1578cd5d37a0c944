#include "auvrl/evaluation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "auvrl/errors.hpp"

namespace auvrl {

Vec6 DeterministicAction(const Policy& policy, const Observation& obs) {
  std::array<float, kObsDim> x;
  for (int i = 0; i < kObsDim; ++i) x[i] = static_cast<float>(obs[i]);
  std::array<float, kActDim> mean;
  policy.Forward(std::span<const float>(x), std::span<float>(mean), nullptr);
  Vec6 a;
  for (int i = 0; i < kActDim; ++i) a[i] = mean[i];
  return a;
}

namespace {

class AttitudeReference {
 public:
  AttitudeReference(const ScenarioSpec& scenario, const Quat& initial)
      : scenario_(scenario), held_(initial) {
    if (scenario.attitude.mode == AttitudeMode::kRandomPerWaypoint) {
      per_segment_ = RandomSegmentAttitudes(scenario.attitude,
                                            scenario.path.num_segments());
    }
  }

  Quat At(const LosCommand& cmd) {
    switch (scenario_.attitude.mode) {
      case AttitudeMode::kCourseAligned:
        if (auto q = CourseAttitude(cmd.v_d_world)) held_ = *q;
        return held_;
      case AttitudeMode::kFixed: {
        const Vec3& s = scenario_.attitude.setpoint;
        return EulerToQuat(s.x(), s.y(), s.z());
      }
      case AttitudeMode::kRandomPerWaypoint: {
        const int k = std::min<int>(cmd.state.segment,
                                    static_cast<int>(per_segment_.size()) - 1);
        return per_segment_[k];
      }
    }
    return held_;
  }

  const std::vector<Quat>& per_segment() const { return per_segment_; }

 private:
  const ScenarioSpec& scenario_;
  Quat held_;
  std::vector<Quat> per_segment_;
};

MetricsRow MakeRow(double t, const BodyState& s, const ReferenceState& ref,
                   const Vec6& action, double cross_track, int segment) {
  MetricsRow r;
  r.t = t;
  r.v_d = ref.v_d;
  r.v = s.v;
  r.v_e = s.v - ref.v_d;
  r.q_d = ref.q_d;
  r.q = s.q;
  r.attitude_error_deg = QuatAngle(ref.q_d, s.q) * 180.0 / std::numbers::pi;
  r.omega = s.omega;
  r.action = action;
  r.cross_track = cross_track;
  r.position = s.p;
  r.segment = segment;
  return r;
}

}  // namespace

EvalResult Evaluate(const Policy& policy, const ScenarioSpec& scenario,
                    const EnvConfig& env, double transient_s) {
  scenario.Validate();
  env.Validate();
  EvalResult result;
  result.vehicle = ApplyPerturbation(env.vehicle, scenario.perturbation);
  const VehicleModel model(result.vehicle);
  const double dt = env.control_dt();
  const double lim = env.integral_limit;

  BodyState state;
  state.p = scenario.initial_position.value_or(scenario.path.waypoints.front());
  state.q = EulerToQuat(scenario.initial_attitude.x(),
                        scenario.initial_attitude.y(),
                        scenario.initial_attitude.z());
  AttitudeReference attitude(scenario, state.q);
  result.segment_attitudes = attitude.per_segment();

  GuidanceState guidance;
  LosCommand cmd = LosVelocity(state.p, state.q, scenario.path, guidance);
  guidance = cmd.state;
  ReferenceState ref{cmd.v_d_body, attitude.At(cmd)};
  Vec3 z_v = Vec3::Zero();
  Vec3 z_q = Vec3::Zero();

  const long max_steps = static_cast<long>(std::ceil(scenario.max_duration / dt - 1e-9));
  long step = 0;
  while (!guidance.finished && step < max_steps) {
    const double t = step * dt;
    const Observation obs = Observe(state, ref, z_v, z_q);
    const Vec6 action = DeterministicAction(policy, obs);
    result.rows.push_back(
        MakeRow(t, state, ref, action,
                CrossTrackError(state.p, scenario.path, guidance),
                guidance.segment));

    for (int k = 0; k < env.control_decimation; ++k) {
      const StepResult r = StepDynamics(state, action, model, env.physics_dt);
      const Vec6 nu = r.state.nu();
      if (r.diverged || !nu.allFinite() ||
          nu.cwiseAbs().maxCoeff() > env.velocity_limit) {
        throw RuntimeFailure("evaluation diverged at t = " +
                             std::to_string(t) + " s in scenario '" +
                             scenario.id + "'");
      }
      state = r.state;
    }
    ++step;

    cmd = LosVelocity(state.p, state.q, scenario.path, guidance);
    guidance = cmd.state;
    ref = ReferenceState{cmd.v_d_body, attitude.At(cmd)};
    const Quat q_e = QuatError(ref.q_d, state.q);
    z_v = (z_v + (state.v - ref.v_d) * dt).cwiseMax(-lim).cwiseMin(lim);
    z_q = (z_q + q_e.vec() * dt).cwiseMax(-lim).cwiseMin(lim);
  }

  if (guidance.finished) {
    const GuidanceState final_segment{scenario.path.num_segments() - 1, false};
    MetricsRow last = MakeRow(
        step * dt, state, ref, Vec6::Zero(),
        CrossTrackError(state.p, scenario.path, final_segment),
        final_segment.segment);
    last.finished = true;
    result.rows.push_back(last);
  }
  result.summary = Summarize(result.rows, transient_s);
  return result;
}

}  // namespace auvrl
