#ifndef AUVRL_EVALUATION_HPP_
#define AUVRL_EVALUATION_HPP_

#include <vector>

#include "auvrl/metrics.hpp"
#include "auvrl/ppo.hpp"
#include "auvrl/scenario.hpp"
#include "auvrl/swim_env.hpp"

namespace auvrl {

// Mean action of the policy (no sampling), already inside [-1, 1].
Vec6 DeterministicAction(const Policy& policy, const Observation& obs);

struct EvalResult {
  std::vector<MetricsRow> rows;
  Summary summary;
  VehicleParams vehicle;                // after the scenario perturbation
  std::vector<Quat> segment_attitudes;  // random-per-waypoint mode only
};

// Single-vehicle closed loop: LOS guidance supplies the body-frame velocity
// reference, the schedule supplies the attitude reference, the policy acts
// at the control rate of `env` and the integral states are propagated with
// the same limits as in training. Stops when the path is finished or the
// scenario duration runs out. Throws RuntimeFailure if the state diverges.
EvalResult Evaluate(const Policy& policy, const ScenarioSpec& scenario,
                    const EnvConfig& env, double transient_s = 3.0);

}  // namespace auvrl

#endif  // AUVRL_EVALUATION_HPP_
