#include "auvrl/swim_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "auvrl/errors.hpp"

namespace auvrl {

void RewardWeights::Validate() const {
  for (double w : {orientation, angular_velocity, linear_velocity, action}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("reward weights must be finite and >= 0");
    }
  }
}

void RandomizationSpec::Validate() const {
  for (const auto& [lo, hi] : {mass_factor, buoyancy_factor}) {
    if (!(lo > 0.0) || !(lo <= hi) || !std::isfinite(hi)) {
      throw InvalidArgument("randomization range must satisfy 0 < lo <= hi");
    }
  }
  if (!(cb_offset_radius >= 0.0) || !std::isfinite(cb_offset_radius)) {
    throw InvalidArgument("cb offset radius must be >= 0");
  }
}

int EnvConfig::episode_steps() const {
  return static_cast<int>(std::lround(episode_length / control_dt()));
}

void EnvConfig::Validate() const {
  if (num_envs < 1) throw InvalidArgument("num_envs must be >= 1");
  if (!(physics_dt > 0.0 && physics_dt <= 0.05)) {
    throw InvalidArgument("physics dt must lie in (0, 0.05]");
  }
  if (control_decimation < 1) {
    throw InvalidArgument("control decimation must be >= 1");
  }
  if (!(episode_length > 0.0) || episode_steps() < 1) {
    throw InvalidArgument("episode length must cover at least one step");
  }
  if (!(integral_limit > 0.0)) {
    throw InvalidArgument("integral limit must be > 0");
  }
  if (!(velocity_limit > 0.0)) {
    throw InvalidArgument("velocity limit must be > 0");
  }
  if (!(reference_speed >= 0.0)) {
    throw InvalidArgument("reference speed must be >= 0");
  }
  vehicle.Validate();
  trajectory.Validate();
  weights.Validate();
  randomization.Validate();
}

VehicleParams RandomizeParams(const VehicleParams& base,
                              const RandomizationSpec& spec, Rng& rng) {
  spec.Validate();
  constexpr int kMaxAttempts = 16;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    VehicleParams p = base;
    const double mass_factor =
        Uniform(rng, spec.mass_factor.first, spec.mass_factor.second);
    const double buoyancy_factor =
        Uniform(rng, spec.buoyancy_factor.first, spec.buoyancy_factor.second);
    p.mass = base.mass * mass_factor;
    p.inertia = base.inertia * mass_factor;
    p.weight = base.weight * mass_factor;
    p.buoyancy = base.buoyancy * buoyancy_factor;
    p.r_cb = base.r_cb + UniformInBall(rng, spec.cb_offset_radius);
    try {
      MassMatrix(p);
      return p;
    } catch (const InvalidParameters&) {
      continue;
    }
  }
  throw InvalidParameters("RandomizeParams: no valid draw after " +
                          std::to_string(kMaxAttempts) + " attempts");
}

Observation Observe(const BodyState& state, const ReferenceState& ref,
                    const Vec3& z_v, const Vec3& z_q) {
  const Quat q_e = QuatError(ref.q_d, state.q);
  const Vec3 v_e = state.v - ref.v_d;
  return {q_e.w,          q_e.x,          q_e.y,          q_e.z,
          v_e.x(),        v_e.y(),        v_e.z(),        state.omega.x(),
          state.omega.y(), state.omega.z(), z_v.x(),       z_v.y(),
          z_v.z(),        z_q.x(),        z_q.y(),        z_q.z()};
}

double Reward(const Observation& obs, const Vec6& action,
              const RewardWeights& weights) {
  const double angle = 2.0 * std::acos(std::clamp(std::abs(obs[0]), 0.0, 1.0));
  const double ve2 = obs[4] * obs[4] + obs[5] * obs[5] + obs[6] * obs[6];
  const double w2 = obs[7] * obs[7] + obs[8] * obs[8] + obs[9] * obs[9];
  return weights.linear_velocity * std::exp(-ve2) +
         weights.angular_velocity * std::exp(-w2) +
         weights.orientation * std::exp(-angle) +
         weights.action * std::exp(-action.norm());
}

SwimEnv::SwimEnv(const EnvConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed) {
  config_.Validate();
  episode_steps_ = config_.episode_steps();
  const int n = config_.num_envs;
  slots_.resize(n);
  for (int i = 0; i < n; ++i) {
    slots_[i].rng = MakeStream(seed_, static_cast<std::uint64_t>(i));
  }
  out_.observations.assign(static_cast<std::size_t>(n) * kObsDim, 0.0);
  out_.rewards.assign(n, 0.0);
  out_.dones.assign(n, 0);
  out_.timeouts.assign(n, 0);
  out_.diverged.assign(n, 0);
  pool_ = std::make_unique<ThreadPool>(config_.num_workers);
}

void SwimEnv::WriteObservation(int i, const Observation& obs) {
  double* row = out_.observations.data() + static_cast<std::size_t>(i) * kObsDim;
  for (int k = 0; k < kObsDim; ++k) {
    row[k] = std::isfinite(obs[k]) ? obs[k] : 0.0;
  }
}

void SwimEnv::ResetSlot(int i, bool stagger) {
  Slot& s = slots_[i];
  s.model = VehicleModel(
      RandomizeParams(config_.vehicle, config_.randomization, s.rng));
  s.episode = SampleEpisodeReference(s.rng, config_.trajectory,
                                     config_.reference_speed);
  s.track = FrenetAttitudeTrack(s.episode.trajectory);
  s.state = BodyState{};
  s.state.q = UniformRotation(s.rng);
  s.z_v.setZero();
  s.z_q.setZero();
  s.step = 0;
  if (stagger) {
    s.step = std::uniform_int_distribution<int>(0, episode_steps_ - 1)(s.rng);
  }
  ++s.episodes;
  s.ref.v_d = s.episode.v_d;
  s.ref.q_d = EpisodeAttitude(s.episode, s.track, s.step * config_.control_dt());
  WriteObservation(i, Observe(s.state, s.ref, s.z_v, s.z_q));
}

const std::vector<double>& SwimEnv::ResetAll() {
  const bool stagger = config_.stagger_initial_clock;
  pool_->ParallelFor(slots_.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      // staggering only applies to the very first episode of a slot
      ResetSlot(static_cast<int>(i), stagger && slots_[i].episodes == 0);
    }
  });
  return out_.observations;
}

const std::vector<double>& SwimEnv::Reset(std::span<const int> env_indices) {
  for (int i : env_indices) {
    if (i < 0 || i >= num_envs()) {
      throw InvalidArgument("Reset: environment index out of range");
    }
  }
  pool_->ParallelFor(env_indices.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) ResetSlot(env_indices[k], false);
  });
  return out_.observations;
}

void SwimEnv::StepSlot(int i, const double* action_ptr) {
  Slot& s = slots_[i];
  const Vec6 action = Eigen::Map<const Vec6>(action_ptr);
  // the reward and the physics see the same (clamped) action
  const Vec6 applied = action.cwiseMax(-1.0).cwiseMin(1.0);

  bool diverged = action.hasNaN();
  for (int k = 0; k < config_.control_decimation && !diverged; ++k) {
    const StepResult r =
        StepDynamics(s.state, applied, s.model, config_.physics_dt);
    diverged = r.diverged;
    if (!diverged) s.state = r.state;
  }
  const double dt = config_.control_dt();
  ++s.step;
  s.ref.q_d = EpisodeAttitude(s.episode, s.track, s.step * dt);

  const Quat q_e = QuatError(s.ref.q_d, s.state.q);
  const double lim = config_.integral_limit;
  s.z_v = (s.z_v + (s.state.v - s.ref.v_d) * dt).cwiseMax(-lim).cwiseMin(lim);
  s.z_q = (s.z_q + q_e.vec() * dt).cwiseMax(-lim).cwiseMin(lim);

  const Observation obs = Observe(s.state, s.ref, s.z_v, s.z_q);
  const Vec6 nu = s.state.nu();
  diverged = diverged || !nu.allFinite() ||
             nu.cwiseAbs().maxCoeff() > config_.velocity_limit;
  double reward = Reward(obs, applied, config_.weights);
  if (!std::isfinite(reward)) reward = 0.0;

  const bool timeout = s.step >= episode_steps_;
  WriteObservation(i, obs);
  out_.rewards[i] = reward;
  out_.diverged[i] = diverged ? 1 : 0;
  out_.timeouts[i] = (timeout && !diverged) ? 1 : 0;
  out_.dones[i] = (timeout || diverged) ? 1 : 0;
}

const StepBatch& SwimEnv::Step(std::span<const double> actions) {
  if (actions.size() != static_cast<std::size_t>(num_envs()) * kActDim) {
    throw InvalidArgument("Step: expected " +
                          std::to_string(num_envs() * kActDim) +
                          " action values, got " +
                          std::to_string(actions.size()));
  }
  pool_->ParallelFor(slots_.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      StepSlot(static_cast<int>(i), actions.data() + i * kActDim);
    }
  });
  return out_;
}

}  // namespace auvrl
