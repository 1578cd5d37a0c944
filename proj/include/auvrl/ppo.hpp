#ifndef AUVRL_PPO_HPP_
#define AUVRL_PPO_HPP_

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "auvrl/actor_critic.hpp"
#include "auvrl/random.hpp"
#include "auvrl/swim_env.hpp"

namespace auvrl {

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double learning_rate = 1e-3;
  int epochs = 5;
  int minibatches = 4;
  int horizon = 24;
  double entropy_coef = 0.005;
  double value_coef = 1.0;
  double max_grad_norm = 1.0;
  int iterations = 600;
  // KL-adaptive learning rate, capped at learning_rate; disabled when <= 0.
  double desired_kl = 0.01;
  double init_log_std = 0.0;
  std::vector<int> hidden = {128, 128};
  int checkpoint_every = 50;  // iterations, 0 = only the final checkpoint

  void Validate() const;
};

using Policy = ActorCritic<float>;

// On-policy storage for one rollout, sample index t * num_envs + n.
struct RolloutBuffer {
  RolloutBuffer() = default;
  RolloutBuffer(int horizon, int num_envs, int obs_dim = kObsDim,
                int act_dim = kActDim);

  int horizon = 0;
  int num_envs = 0;
  Eigen::MatrixXf observations;  // obs_dim x (T N)
  Eigen::MatrixXf actions;       // act_dim x (T N), pre-clamp draws
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;

  int size() const { return horizon * num_envs; }
  int index(int t, int n) const { return t * num_envs + n; }
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t
// A_t     = delta_t + gamma lambda (1 - done_t) A_{t+1}
// V_T is `bootstrap_values`. Arrays use index t * num_envs + n.
GaeResult ComputeGae(std::span<const double> rewards,
                     std::span<const double> values,
                     std::span<const std::uint8_t> dones,
                     std::span<const double> bootstrap_values, int horizon,
                     int num_envs, double gamma, double lambda);

GaeResult ComputeGae(const RolloutBuffer& buffer,
                     std::span<const double> bootstrap_values, double gamma,
                     double lambda);

// Zero mean, unit variance (sigma floored at 1e-8).
void NormalizeAdvantages(std::vector<double>* advantages);

struct ActionSample {
  Vec6 action;  // clamped to [-1, 1]
  Vec6 draw;    // pre-clamp Gaussian draw
  double log_prob = 0.0;
};

// Diagonal Gaussian draw around `mean`; log-probability of the pre-clamp
// draw.
ActionSample SampleAction(const Vec6& mean, const Vec6& log_std, Rng& rng);

struct LossStats {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double mean_ratio = 0.0;
  double grad_norm = 0.0;
};

// Clipped-surrogate PPO loss over one minibatch and its gradient with
// respect to every parameter of `net`:
//   L = -mean(min(r A, clip(r, 1-eps, 1+eps) A))
//       + c_v mean((V - R)^2) - c_e H
// with r = exp(log_prob - old_log_prob). `grad` may be null.
template <typename Scalar>
LossStats PpoLoss(const ActorCritic<Scalar>& net,
                  const typename ActorCritic<Scalar>::Matrix& obs,
                  const typename ActorCritic<Scalar>::Matrix& actions,
                  std::span<const double> old_log_probs,
                  std::span<const double> advantages,
                  std::span<const double> returns, const PpoConfig& cfg,
                  typename ActorCritic<Scalar>::Vector* grad);

// Adam with bias correction over a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  explicit Adam(int size, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  template <typename Vector>
  void Step(Vector* params, const Vector& grad, double learning_rate);

  long steps() const { return steps_; }

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long steps_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

// Runs the epochs x minibatches optimization of one PPO update and keeps
// the optimizer state across iterations.
class PpoUpdater {
 public:
  PpoUpdater(const PpoConfig& cfg, int num_params);

  // Advantages are normalized inside. Throws RuntimeFailure (parameters
  // restored to their value before the call) if a loss or parameter turns
  // non-finite.
  LossStats Update(Policy* policy, const RolloutBuffer& buffer,
                   std::vector<double> advantages,
                   const std::vector<double>& returns, Rng& rng);

  double learning_rate() const { return learning_rate_; }

 private:
  PpoConfig cfg_;
  Adam adam_;
  double learning_rate_;
};

struct IterationLog {
  int iteration = 0;
  double wall_s = 0.0;
  long long env_steps = 0;
  double norm_mean_reward = 0.0;  // mean per-step reward / sum of weights
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_frac = 0.0;
  // diagnostics, not written to the CSV
  int diverged = 0;
  int episodes = 0;
  double mean_ratio = 1.0;
  double approx_kl = 0.0;
  double learning_rate = 0.0;
};

// Collect-rollout -> GAE -> PPO update loop on a SwimEnv.
class Trainer {
 public:
  Trainer(const EnvConfig& env_config, const PpoConfig& ppo_config,
          std::uint64_t seed);

  IterationLog RunIteration();

  const Policy& policy() const { return policy_; }
  Policy& mutable_policy() { return policy_; }
  const std::vector<IterationLog>& log() const { return log_; }
  SwimEnv& env() { return env_; }

 private:
  void Collect(IterationLog* entry);

  EnvConfig env_config_;
  PpoConfig cfg_;
  SwimEnv env_;
  Policy policy_;
  PpoUpdater updater_;
  Rng rng_;
  RolloutBuffer buffer_;
  Eigen::MatrixXf current_obs_;  // obs_dim x N
  std::vector<double> episode_reward_;
  std::vector<int> episode_length_;
  double last_norm_reward_ = 0.0;
  double elapsed_s_ = 0.0;
  long long env_steps_ = 0;
  std::vector<IterationLog> log_;
};

// ---------------------------------------------------------------------------
// Template implementations.

template <typename Scalar>
LossStats PpoLoss(const ActorCritic<Scalar>& net,
                  const typename ActorCritic<Scalar>::Matrix& obs,
                  const typename ActorCritic<Scalar>::Matrix& actions,
                  std::span<const double> old_log_probs,
                  std::span<const double> advantages,
                  std::span<const double> returns, const PpoConfig& cfg,
                  typename ActorCritic<Scalar>::Vector* grad) {
  using Net = ActorCritic<Scalar>;
  const int batch = static_cast<int>(obs.cols());
  const int act_dim = net.spec().act_dim;
  if (batch < 1 || actions.cols() != batch || actions.rows() != act_dim ||
      static_cast<int>(old_log_probs.size()) != batch ||
      static_cast<int>(advantages.size()) != batch ||
      static_cast<int>(returns.size()) != batch) {
    throw InvalidArgument("PpoLoss: inconsistent minibatch shapes");
  }
  typename Net::Trace trace;
  typename Net::Matrix mean;
  typename Net::RowVector value;
  net.Forward(obs, &mean, &value, grad ? &trace : nullptr);

  const auto log_std = net.log_std();
  Eigen::VectorXd ls(act_dim), inv_std(act_dim);
  for (int j = 0; j < act_dim; ++j) {
    ls[j] = static_cast<double>(log_std[j]);
    inv_std[j] = std::exp(-ls[j]);
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const double inv_b = 1.0 / batch;
  const double lo = 1.0 - cfg.clip, hi = 1.0 + cfg.clip;

  LossStats s;
  typename Net::Matrix d_mean(act_dim, batch);
  typename Net::RowVector d_value(batch);
  Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(act_dim);
  double clipped = 0.0;
  for (int i = 0; i < batch; ++i) {
    double log_prob = 0.0;
    for (int j = 0; j < act_dim; ++j) {
      const double z = (static_cast<double>(actions(j, i)) -
                        static_cast<double>(mean(j, i))) *
                       inv_std[j];
      log_prob += -0.5 * z * z - ls[j] - half_log_2pi;
    }
    const double log_ratio = log_prob - old_log_probs[i];
    const double ratio = std::exp(log_ratio);
    const double adv = advantages[i];
    const double unclipped = ratio * adv;
    const double clipped_obj = std::clamp(ratio, lo, hi) * adv;
    s.policy -= std::min(unclipped, clipped_obj) * inv_b;
    s.mean_ratio += ratio * inv_b;
    s.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;
    if (std::abs(ratio - 1.0) > cfg.clip) clipped += 1.0;

    // gradient flows only through the unclipped branch when it is the min
    const double d_log_prob = unclipped <= clipped_obj ? -adv * ratio * inv_b
                                                       : 0.0;
    for (int j = 0; j < act_dim; ++j) {
      const double z = (static_cast<double>(actions(j, i)) -
                        static_cast<double>(mean(j, i))) *
                       inv_std[j];
      d_mean(j, i) = static_cast<Scalar>(d_log_prob * z * inv_std[j]);
      d_log_std[j] += d_log_prob * (z * z - 1.0);
    }
    const double err = static_cast<double>(value(i)) - returns[i];
    s.value += err * err * inv_b;
    d_value(i) = static_cast<Scalar>(2.0 * cfg.value_coef * err * inv_b);
  }
  for (int j = 0; j < act_dim; ++j) s.entropy += ls[j] + 0.5 + half_log_2pi;
  s.clip_fraction = clipped * inv_b;
  s.total = s.policy + cfg.value_coef * s.value - cfg.entropy_coef * s.entropy;

  if (grad) {
    grad->setZero(net.num_params());
    net.Backward(trace, d_mean, d_value, grad);
    const int offset = net.blocks().back().offset;
    for (int j = 0; j < act_dim; ++j) {
      (*grad)[offset + j] +=
          static_cast<Scalar>(d_log_std[j] - cfg.entropy_coef);
    }
  }
  return s;
}

template <typename Vector>
void Adam::Step(Vector* params, const Vector& grad, double learning_rate) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (Eigen::Index i = 0; i < params->size(); ++i) {
    const double g = static_cast<double>(grad[i]);
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    (*params)[i] -= static_cast<typename Vector::Scalar>(
        learning_rate * m_hat / (std::sqrt(v_hat) + eps_));
  }
}

}  // namespace auvrl

#endif  // AUVRL_PPO_HPP_
