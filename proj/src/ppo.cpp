#include "auvrl/ppo.hpp"

#include <chrono>
#include <numeric>
#include <string>

#include "auvrl/errors.hpp"

namespace auvrl {

void PpoConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("ppo.gamma must lie in (0, 1]");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("ppo.lambda must lie in (0, 1]");
  }
  if (!(clip >= 0.0 && clip < 1.0)) {
    throw InvalidArgument("ppo.clip must lie in [0, 1)");
  }
  if (!(learning_rate > 0.0)) {
    throw InvalidArgument("ppo.learning_rate must be > 0");
  }
  if (epochs < 1 || minibatches < 1 || horizon < 1 || iterations < 0) {
    throw InvalidArgument(
        "ppo.epochs, ppo.minibatches and ppo.horizon must be >= 1");
  }
  if (entropy_coef < 0.0 || value_coef < 0.0 || !(max_grad_norm > 0.0)) {
    throw InvalidArgument("ppo coefficients must be non-negative");
  }
  if (hidden.empty()) throw InvalidArgument("ppo.hidden must not be empty");
  for (int h : hidden) {
    if (h < 1) throw InvalidArgument("ppo.hidden sizes must be >= 1");
  }
  if (checkpoint_every < 0) {
    throw InvalidArgument("ppo.checkpoint_every must be >= 0");
  }
}

RolloutBuffer::RolloutBuffer(int horizon_in, int num_envs_in, int obs_dim,
                             int act_dim)
    : horizon(horizon_in), num_envs(num_envs_in) {
  const int n = horizon * num_envs;
  observations.setZero(obs_dim, n);
  actions.setZero(act_dim, n);
  log_probs.assign(n, 0.0);
  rewards.assign(n, 0.0);
  values.assign(n, 0.0);
  dones.assign(n, 0);
}

GaeResult ComputeGae(std::span<const double> rewards,
                     std::span<const double> values,
                     std::span<const std::uint8_t> dones,
                     std::span<const double> bootstrap_values, int horizon,
                     int num_envs, double gamma, double lambda) {
  const std::size_t n = static_cast<std::size_t>(horizon) * num_envs;
  if (horizon < 1 || num_envs < 1 || rewards.size() != n ||
      values.size() != n || dones.size() != n ||
      bootstrap_values.size() != static_cast<std::size_t>(num_envs)) {
    throw InvalidArgument("ComputeGae: inconsistent buffer shapes");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  for (int e = 0; e < num_envs; ++e) {
    double next_value = bootstrap_values[e];
    double next_adv = 0.0;
    for (int t = horizon - 1; t >= 0; --t) {
      const std::size_t i = static_cast<std::size_t>(t) * num_envs + e;
      const double not_done = dones[i] ? 0.0 : 1.0;
      const double delta =
          rewards[i] + gamma * next_value * not_done - values[i];
      next_adv = delta + gamma * lambda * not_done * next_adv;
      out.advantages[i] = next_adv;
      out.returns[i] = next_adv + values[i];
      next_value = values[i];
    }
  }
  return out;
}

GaeResult ComputeGae(const RolloutBuffer& buffer,
                     std::span<const double> bootstrap_values, double gamma,
                     double lambda) {
  return ComputeGae(buffer.rewards, buffer.values, buffer.dones,
                    bootstrap_values, buffer.horizon, buffer.num_envs, gamma,
                    lambda);
}

void NormalizeAdvantages(std::vector<double>* advantages) {
  if (advantages->empty()) return;
  const double n = static_cast<double>(advantages->size());
  const double mean =
      std::accumulate(advantages->begin(), advantages->end(), 0.0) / n;
  double var = 0.0;
  for (double a : *advantages) var += (a - mean) * (a - mean);
  var /= n;
  const double sigma = std::max(std::sqrt(var), 1e-8);
  for (double& a : *advantages) a = (a - mean) / sigma;
}

ActionSample SampleAction(const Vec6& mean, const Vec6& log_std, Rng& rng) {
  if (!mean.allFinite() || log_std.hasNaN()) {
    throw InvalidArgument("SampleAction: non-finite mean or log_std");
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  ActionSample s;
  s.log_prob = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double sigma = std::exp(log_std[j]);
    const double eps = StandardNormal(rng);
    s.draw[j] = mean[j] + sigma * eps;
    s.action[j] = std::clamp(s.draw[j], -1.0, 1.0);
    s.log_prob += -0.5 * eps * eps - log_std[j] - half_log_2pi;
  }
  return s;
}

Adam::Adam(int size, double beta1, double beta2, double eps)
    : beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) {}

PpoUpdater::PpoUpdater(const PpoConfig& cfg, int num_params)
    : cfg_(cfg), adam_(num_params), learning_rate_(cfg.learning_rate) {
  cfg_.Validate();
}

LossStats PpoUpdater::Update(Policy* policy, const RolloutBuffer& buffer,
                             std::vector<double> advantages,
                             const std::vector<double>& returns, Rng& rng) {
  const int total = buffer.size();
  if (static_cast<int>(advantages.size()) != total ||
      static_cast<int>(returns.size()) != total) {
    throw InvalidArgument("PpoUpdater::Update: advantage/return size mismatch");
  }
  NormalizeAdvantages(&advantages);

  const Policy::Vector backup = policy->params();
  const int mb_count = std::min(cfg_.minibatches, total);
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);

  LossStats mean_stats;
  int updates = 0;
  Policy::Matrix obs, actions;
  std::vector<double> old_lp, adv, ret;
  Policy::Vector grad;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int mb = 0; mb < mb_count; ++mb) {
      const int begin = static_cast<int>(static_cast<long long>(total) * mb /
                                         mb_count);
      const int end = static_cast<int>(static_cast<long long>(total) *
                                       (mb + 1) / mb_count);
      const int size = end - begin;
      obs.resize(buffer.observations.rows(), size);
      actions.resize(buffer.actions.rows(), size);
      old_lp.resize(size);
      adv.resize(size);
      ret.resize(size);
      for (int k = 0; k < size; ++k) {
        const int i = order[begin + k];
        obs.col(k) = buffer.observations.col(i);
        actions.col(k) = buffer.actions.col(i);
        old_lp[k] = buffer.log_probs[i];
        adv[k] = advantages[i];
        ret[k] = returns[i];
      }
      LossStats s =
          PpoLoss<float>(*policy, obs, actions, old_lp, adv, ret, cfg_, &grad);
      if (!std::isfinite(s.total) || !grad.allFinite()) {
        policy->params() = backup;
        throw RuntimeFailure("PPO update aborted: non-finite loss (policy " +
                             std::to_string(s.policy) + ", value " +
                             std::to_string(s.value) + ") in epoch " +
                             std::to_string(epoch));
      }
      const double norm = grad.template cast<double>().norm();
      s.grad_norm = norm;
      if (norm > cfg_.max_grad_norm) {
        grad *= static_cast<float>(cfg_.max_grad_norm / norm);
      }
      if (cfg_.desired_kl > 0.0) {
        if (s.approx_kl > 2.0 * cfg_.desired_kl) {
          learning_rate_ = std::max(1e-5, learning_rate_ / 1.5);
        } else if (s.approx_kl < 0.5 * cfg_.desired_kl && s.approx_kl > 0.0) {
          learning_rate_ = std::min(cfg_.learning_rate, learning_rate_ * 1.5);
        }
      }
      adam_.Step(&policy->params(), grad, learning_rate_);
      if (!policy->AllFinite()) {
        policy->params() = backup;
        throw RuntimeFailure("PPO update aborted: non-finite parameters");
      }
      mean_stats.total += s.total;
      mean_stats.policy += s.policy;
      mean_stats.value += s.value;
      mean_stats.entropy += s.entropy;
      mean_stats.clip_fraction += s.clip_fraction;
      mean_stats.approx_kl += s.approx_kl;
      mean_stats.mean_ratio += s.mean_ratio;
      mean_stats.grad_norm += s.grad_norm;
      ++updates;
    }
  }
  const double inv = 1.0 / updates;
  mean_stats.total *= inv;
  mean_stats.policy *= inv;
  mean_stats.value *= inv;
  mean_stats.entropy *= inv;
  mean_stats.clip_fraction *= inv;
  mean_stats.approx_kl *= inv;
  mean_stats.mean_ratio *= inv;
  mean_stats.grad_norm *= inv;
  return mean_stats;
}

namespace {

NetworkSpec SpecFor(const PpoConfig& cfg) {
  NetworkSpec spec;
  spec.hidden = cfg.hidden;
  return spec;
}

}  // namespace

Trainer::Trainer(const EnvConfig& env_config, const PpoConfig& ppo_config,
                 std::uint64_t seed)
    : env_config_(env_config),
      cfg_(ppo_config),
      env_(env_config, seed),
      policy_(SpecFor(ppo_config)),
      updater_(ppo_config, policy_.num_params()),
      rng_(MakeStream(seed, 0xA11CE5ULL << 32)),
      buffer_(ppo_config.horizon, env_config.num_envs) {
  cfg_.Validate();
  Rng init_rng = MakeStream(seed, 0x1417ULL << 32);
  policy_.Initialize(init_rng, cfg_.init_log_std);
  const int n = env_.num_envs();
  const std::vector<double>& obs = env_.ResetAll();
  current_obs_ =
      Eigen::Map<const Eigen::MatrixXd>(obs.data(), kObsDim, n).cast<float>();
  episode_reward_.assign(n, 0.0);
  episode_length_.assign(n, 0);
}

void Trainer::Collect(IterationLog* entry) {
  const int n = env_.num_envs();
  const double weight_sum = env_config_.weights.Sum();
  Policy::Matrix mean;
  Policy::RowVector value;
  std::vector<double> actions(static_cast<std::size_t>(n) * kActDim);
  Vec6 log_std = policy_.log_std().cast<double>();
  std::vector<int> done_envs, timeout_envs;
  double completed_reward = 0.0;
  int completed = 0;

  for (int t = 0; t < cfg_.horizon; ++t) {
    policy_.Forward(current_obs_, &mean, &value);
    for (int e = 0; e < n; ++e) {
      const int i = buffer_.index(t, e);
      const ActionSample s =
          SampleAction(mean.col(e).cast<double>(), log_std, rng_);
      buffer_.observations.col(i) = current_obs_.col(e);
      buffer_.actions.col(i) = s.draw.cast<float>();
      buffer_.log_probs[i] = s.log_prob;
      buffer_.values[i] = value(e);
      for (int j = 0; j < kActDim; ++j) actions[e * kActDim + j] = s.action[j];
    }
    const StepBatch& out = env_.Step(actions);
    const Eigen::MatrixXf next_obs =
        Eigen::Map<const Eigen::MatrixXd>(out.observations.data(), kObsDim, n)
            .cast<float>();

    done_envs.clear();
    timeout_envs.clear();
    for (int e = 0; e < n; ++e) {
      const int i = buffer_.index(t, e);
      buffer_.rewards[i] = out.rewards[e];
      buffer_.dones[i] = out.dones[e];
      episode_reward_[e] += out.rewards[e];
      episode_length_[e] += 1;
      if (out.dones[e]) {
        done_envs.push_back(e);
        if (out.timeouts[e]) timeout_envs.push_back(e);
        if (out.diverged[e]) ++entry->diverged;
        completed_reward += episode_reward_[e] / episode_length_[e];
        ++completed;
        episode_reward_[e] = 0.0;
        episode_length_[e] = 0;
      }
    }
    // Time limits are not failures: bootstrap the value of the final state.
    if (!timeout_envs.empty()) {
      Policy::Matrix terminal(kObsDim, timeout_envs.size());
      for (std::size_t k = 0; k < timeout_envs.size(); ++k) {
        terminal.col(k) = next_obs.col(timeout_envs[k]);
      }
      const Policy::RowVector v = policy_.Value(terminal);
      for (std::size_t k = 0; k < timeout_envs.size(); ++k) {
        buffer_.rewards[buffer_.index(t, timeout_envs[k])] +=
            cfg_.gamma * static_cast<double>(v(k));
      }
    }
    current_obs_ = next_obs;
    if (!done_envs.empty()) {
      const std::vector<double>& reset_obs = env_.Reset(done_envs);
      for (int e : done_envs) {
        for (int k = 0; k < kObsDim; ++k) {
          current_obs_(k, e) = static_cast<float>(
              reset_obs[static_cast<std::size_t>(e) * kObsDim + k]);
        }
      }
    }
  }
  entry->episodes = completed;
  if (completed > 0) {
    last_norm_reward_ = completed_reward / completed / weight_sum;
  }
  entry->norm_mean_reward = last_norm_reward_;
  env_steps_ += static_cast<long long>(cfg_.horizon) * n;
  entry->env_steps = env_steps_;
}

IterationLog Trainer::RunIteration() {
  const auto start = std::chrono::steady_clock::now();
  IterationLog entry;
  entry.iteration = static_cast<int>(log_.size());
  Collect(&entry);

  const Policy::RowVector bootstrap = policy_.Value(current_obs_);
  std::vector<double> boot(bootstrap.size());
  for (Eigen::Index i = 0; i < bootstrap.size(); ++i) boot[i] = bootstrap(i);
  GaeResult gae = ComputeGae(buffer_, boot, cfg_.gamma, cfg_.lambda);

  const LossStats s = updater_.Update(&policy_, buffer_,
                                      std::move(gae.advantages), gae.returns,
                                      rng_);
  entry.policy_loss = s.policy;
  entry.value_loss = s.value;
  entry.entropy = s.entropy;
  entry.clip_frac = s.clip_fraction;
  entry.mean_ratio = s.mean_ratio;
  entry.approx_kl = s.approx_kl;
  entry.learning_rate = updater_.learning_rate();

  elapsed_s_ += std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  entry.wall_s = elapsed_s_;
  log_.push_back(entry);
  return entry;
}

}  // namespace auvrl
