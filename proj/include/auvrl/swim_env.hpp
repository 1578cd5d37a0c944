#ifndef AUVRL_SWIM_ENV_HPP_
#define AUVRL_SWIM_ENV_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "auvrl/random.hpp"
#include "auvrl/reference.hpp"
#include "auvrl/thread_pool.hpp"
#include "auvrl/vehicle.hpp"

namespace auvrl {

inline constexpr int kObsDim = 16;
inline constexpr int kActDim = 6;

// [q_e (4), v_e (3), omega (3), z_v (3), z_q (3)]
using Observation = std::array<double, kObsDim>;

struct RewardWeights {
  double orientation = 0.4;
  double angular_velocity = 0.05;
  double linear_velocity = 0.2;
  double action = 0.3;

  double Sum() const {
    return orientation + angular_velocity + linear_velocity + action;
  }
  void Validate() const;
};

struct RandomizationSpec {
  std::pair<double, double> mass_factor{0.90, 1.10};
  std::pair<double, double> buoyancy_factor{0.95, 1.05};
  double cb_offset_radius = 0.02;  // m

  void Validate() const;
};

struct EnvConfig {
  int num_envs = 2048;
  double physics_dt = 0.01;     // s
  int control_decimation = 2;   // physics steps per action
  double episode_length = 5.0;  // s
  double integral_limit = 1.0;  // anti-windup bound per component
  double velocity_limit = 5.0;  // divergence guard on |nu_i|
  double reference_speed = 0.5; // m/s
  // Start the first episodes at random clock values so that terminations
  // are spread over rollouts.
  bool stagger_initial_clock = true;
  int num_workers = 0;          // 0 = hardware concurrency

  VehicleParams vehicle = VehicleParams::Default();
  TrajectoryParams trajectory;
  RewardWeights weights;
  RandomizationSpec randomization;

  double control_dt() const { return physics_dt * control_decimation; }
  int episode_steps() const;
  void Validate() const;
};

// Base parameters with mass (and inertia, weight) scaled by one uniform
// factor, buoyancy by another and the CB moved by a uniform point in a ball.
VehicleParams RandomizeParams(const VehicleParams& base,
                              const RandomizationSpec& spec, Rng& rng);

Observation Observe(const BodyState& state, const ReferenceState& ref,
                    const Vec3& z_v, const Vec3& z_q);

// w_v exp(-|v_e|^2) + w_w exp(-|w|^2) + w_q exp(-angle) + w_a exp(-|a|)
double Reward(const Observation& obs, const Vec6& action,
              const RewardWeights& weights);

// Outputs of one batched step, row-major N x 16 observations.
struct StepBatch {
  std::vector<double> observations;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<std::uint8_t> timeouts;  // done because the clock ran out
  std::vector<std::uint8_t> diverged;  // done because the state blew up
};

// N vehicles stepped in lockstep. Every environment owns its random stream
// (master seed, env index), so results do not depend on the worker count.
class SwimEnv {
 public:
  SwimEnv(const EnvConfig& config, std::uint64_t seed);

  int num_envs() const { return config_.num_envs; }
  const EnvConfig& config() const { return config_; }
  int num_workers() const { return pool_->size(); }

  // Resets every environment; returns the observation buffer.
  const std::vector<double>& ResetAll();

  // Resets the listed environments and rewrites their observation rows.
  const std::vector<double>& Reset(std::span<const int> env_indices);

  // actions: N x 6 row-major. Done environments are NOT reset here.
  const StepBatch& Step(std::span<const double> actions);

  const StepBatch& last() const { return out_; }

  // Read-only views for tests and diagnostics.
  const BodyState& state(int i) const { return slots_[i].state; }
  const VehicleParams& params(int i) const { return slots_[i].model.params(); }
  const ReferenceState& reference(int i) const { return slots_[i].ref; }
  const Vec3& z_v(int i) const { return slots_[i].z_v; }
  const Vec3& z_q(int i) const { return slots_[i].z_q; }
  double time(int i) const { return slots_[i].step * config_.control_dt(); }

 private:
  struct Slot {
    BodyState state;
    VehicleModel model;
    EpisodeReference episode;
    FrenetAttitudeTrack track;
    ReferenceState ref;
    Vec3 z_v = Vec3::Zero();
    Vec3 z_q = Vec3::Zero();
    int step = 0;
    std::uint64_t episodes = 0;
    Rng rng;
  };

  void ResetSlot(int i, bool stagger);
  void StepSlot(int i, const double* action);
  void WriteObservation(int i, const Observation& obs);

  EnvConfig config_;
  std::uint64_t seed_;
  int episode_steps_;
  std::vector<Slot> slots_;
  StepBatch out_;
  std::unique_ptr<ThreadPool> pool_;
};

}  // namespace auvrl

#endif  // AUVRL_SWIM_ENV_HPP_
