#ifndef AUVRL_ACTOR_CRITIC_HPP_
#define AUVRL_ACTOR_CRITIC_HPP_

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "auvrl/errors.hpp"
#include "auvrl/random.hpp"

namespace auvrl {

// Layer sizes of the two separate networks. Both share input width and
// hidden sizes; the actor ends in act_dim (tanh-squashed mean), the critic
// in a single value.
struct NetworkSpec {
  int obs_dim = 16;
  std::vector<int> hidden = {128, 128};
  int act_dim = 6;

  std::vector<int> ActorSizes() const;
  std::vector<int> CriticSizes() const;
  bool operator==(const NetworkSpec&) const = default;
};

inline std::vector<int> NetworkSpec::ActorSizes() const {
  std::vector<int> s{obs_dim};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(act_dim);
  return s;
}

inline std::vector<int> NetworkSpec::CriticSizes() const {
  std::vector<int> s{obs_dim};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(1);
  return s;
}

// Location of one parameter block inside the flat parameter vector.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int size() const { return rows * cols; }
};

// Actor-critic MLP pair with ELU hidden activations. All parameters live in
// one flat vector so the optimizer, gradient clipping and checkpointing all
// see the same layout:
//   actor.{k}.weight (out x in, row-major), actor.{k}.bias, ...,
//   critic.{k}.weight, critic.{k}.bias, ..., log_std (act_dim).
// Batched inputs are column-major with one sample per column.
template <typename Scalar>
class ActorCritic {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using WeightMap = Eigen::Map<
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstWeightMap = Eigen::Map<const Eigen::Matrix<
      Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  // Activations of one forward pass, kept for the backward pass.
  struct Trace {
    std::vector<Matrix> actor_pre;   // pre-activations per layer
    std::vector<Matrix> actor_post;  // post-activations, [0] is the input
    std::vector<Matrix> critic_pre;
    std::vector<Matrix> critic_post;
  };

  ActorCritic() : ActorCritic(NetworkSpec{}) {}
  explicit ActorCritic(const NetworkSpec& spec);

  const NetworkSpec& spec() const { return spec_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  auto log_std() { return params_.segment(log_std_offset_, spec_.act_dim); }
  auto log_std() const {
    return params_.segment(log_std_offset_, spec_.act_dim);
  }

  // Uniform(+-1/sqrt(fan_in)) weights and biases, actor output layer scaled
  // by `actor_output_scale`, log_std set to `init_log_std`.
  void Initialize(Rng& rng, double init_log_std = 0.0,
                  double actor_output_scale = 0.01);

  // obs: obs_dim x B. Fills mean (act_dim x B, tanh-squashed) and value
  // (1 x B). `trace` may be null when no gradient is needed.
  void Forward(const Matrix& obs, Matrix* mean, RowVector* value,
               Trace* trace = nullptr) const;

  // Single observation convenience wrapper.
  void Forward(std::span<const Scalar> obs, std::span<Scalar> mean,
               Scalar* value) const;

  // Critic only.
  RowVector Value(const Matrix& obs) const;

  // Back-propagates dL/dmean and dL/dvalue through a stored trace and
  // accumulates into grad (same layout as params()). dL/dlog_std is handled
  // by the caller.
  void Backward(const Trace& trace, const Matrix& d_mean,
                const RowVector& d_value, Vector* grad) const;

  bool AllFinite() const { return params_.allFinite(); }

 private:
  struct Layer {
    int weight_offset;
    int bias_offset;
    int in;
    int out;
  };

  void AddNetwork(const std::string& prefix, const std::vector<int>& sizes,
                  std::vector<Layer>* layers, int* offset);
  void RunNetwork(const std::vector<Layer>& layers, bool tanh_output,
                  const Matrix& input, std::vector<Matrix>* pre,
                  std::vector<Matrix>* post, Matrix* output) const;
  void BackNetwork(const std::vector<Layer>& layers, bool tanh_output,
                   const std::vector<Matrix>& pre,
                   const std::vector<Matrix>& post, const Matrix& d_output,
                   Vector* grad) const;

  NetworkSpec spec_;
  std::vector<ParamBlock> blocks_;
  std::vector<Layer> actor_;
  std::vector<Layer> critic_;
  int log_std_offset_ = 0;
  Vector params_;
};

template <typename Scalar>
ActorCritic<Scalar>::ActorCritic(const NetworkSpec& spec) : spec_(spec) {
  if (spec_.obs_dim < 1 || spec_.act_dim < 1) {
    throw InvalidArgument("network input and output widths must be >= 1");
  }
  for (int h : spec_.hidden) {
    if (h < 1) throw InvalidArgument("hidden layer sizes must be >= 1");
  }
  int offset = 0;
  AddNetwork("actor", spec_.ActorSizes(), &actor_, &offset);
  AddNetwork("critic", spec_.CriticSizes(), &critic_, &offset);
  log_std_offset_ = offset;
  blocks_.push_back({"log_std", spec_.act_dim, 1, offset});
  offset += spec_.act_dim;
  params_ = Vector::Zero(offset);
}

template <typename Scalar>
void ActorCritic<Scalar>::AddNetwork(const std::string& prefix,
                                     const std::vector<int>& sizes,
                                     std::vector<Layer>* layers, int* offset) {
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const int in = sizes[k], out = sizes[k + 1];
    Layer layer{*offset, *offset + in * out, in, out};
    blocks_.push_back(
        {prefix + "." + std::to_string(k) + ".weight", out, in, *offset});
    blocks_.push_back(
        {prefix + "." + std::to_string(k) + ".bias", out, 1, layer.bias_offset});
    *offset += in * out + out;
    layers->push_back(layer);
  }
}

template <typename Scalar>
void ActorCritic<Scalar>::Initialize(Rng& rng, double init_log_std,
                                     double actor_output_scale) {
  auto init = [&](const std::vector<Layer>& layers, double last_scale) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const Layer& l = layers[k];
      double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
      if (k + 1 == layers.size()) bound *= last_scale;
      for (int i = 0; i < l.in * l.out; ++i) {
        params_[l.weight_offset + i] =
            static_cast<Scalar>(Uniform(rng, -bound, bound));
      }
      for (int i = 0; i < l.out; ++i) {
        params_[l.bias_offset + i] =
            static_cast<Scalar>(Uniform(rng, -bound, bound));
      }
    }
  };
  init(actor_, actor_output_scale);
  init(critic_, 1.0);
  log_std().setConstant(static_cast<Scalar>(init_log_std));
}

template <typename Scalar>
void ActorCritic<Scalar>::RunNetwork(const std::vector<Layer>& layers,
                                     bool tanh_output, const Matrix& input,
                                     std::vector<Matrix>* pre,
                                     std::vector<Matrix>* post,
                                     Matrix* output) const {
  Matrix x = input;
  if (post) post->assign(1, input);
  if (pre) pre->clear();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& l = layers[k];
    ConstWeightMap w(params_.data() + l.weight_offset, l.out, l.in);
    Eigen::Map<const Vector> b(params_.data() + l.bias_offset, l.out);
    Matrix z = w * x;
    z.colwise() += b;
    const bool last = k + 1 == layers.size();
    if (last) {
      x = tanh_output ? Matrix(z.array().tanh()) : z;
    } else {
      // ELU: z for z > 0, exp(z) - 1 otherwise
      x = (z.array() > Scalar(0))
              .select(z.array(), z.array().exp() - Scalar(1))
              .matrix();
    }
    if (pre) pre->push_back(std::move(z));
    if (post) post->push_back(x);
  }
  *output = std::move(x);
}

template <typename Scalar>
void ActorCritic<Scalar>::Forward(const Matrix& obs, Matrix* mean,
                                  RowVector* value, Trace* trace) const {
  if (obs.rows() != spec_.obs_dim) {
    throw InvalidArgument("ActorCritic::Forward: observation width " +
                          std::to_string(obs.rows()) + " != " +
                          std::to_string(spec_.obs_dim));
  }
  if (mean) {
    RunNetwork(actor_, true, obs, trace ? &trace->actor_pre : nullptr,
               trace ? &trace->actor_post : nullptr, mean);
  }
  if (value) {
    Matrix v;
    RunNetwork(critic_, false, obs, trace ? &trace->critic_pre : nullptr,
               trace ? &trace->critic_post : nullptr, &v);
    *value = v.row(0);
  }
}

template <typename Scalar>
void ActorCritic<Scalar>::Forward(std::span<const Scalar> obs,
                                  std::span<Scalar> mean,
                                  Scalar* value) const {
  if (static_cast<int>(obs.size()) != spec_.obs_dim ||
      static_cast<int>(mean.size()) != spec_.act_dim) {
    throw InvalidArgument("ActorCritic::Forward: dimension mismatch");
  }
  Matrix x = Eigen::Map<const Matrix>(obs.data(), spec_.obs_dim, 1);
  Matrix m;
  RowVector v;
  Forward(x, &m, value ? &v : nullptr);
  for (int i = 0; i < spec_.act_dim; ++i) mean[i] = m(i, 0);
  if (value) *value = v(0);
}

template <typename Scalar>
typename ActorCritic<Scalar>::RowVector ActorCritic<Scalar>::Value(
    const Matrix& obs) const {
  RowVector v;
  Forward(obs, nullptr, &v);
  return v;
}

template <typename Scalar>
void ActorCritic<Scalar>::BackNetwork(const std::vector<Layer>& layers,
                                      bool tanh_output,
                                      const std::vector<Matrix>& pre,
                                      const std::vector<Matrix>& post,
                                      const Matrix& d_output,
                                      Vector* grad) const {
  Matrix delta;
  const std::size_t n = layers.size();
  for (std::size_t kk = n; kk-- > 0;) {
    const Layer& l = layers[kk];
    if (kk + 1 == n) {
      if (tanh_output) {
        delta = (d_output.array() *
                 (Scalar(1) - post[kk + 1].array().square()))
                    .matrix();
      } else {
        delta = d_output;
      }
    } else {
      // ELU'(z) = 1 for z > 0, exp(z) = post + 1 otherwise
      delta = (pre[kk].array() > Scalar(0))
                  .select(delta.array(), delta.array() *
                                             (post[kk + 1].array() + Scalar(1)))
                  .matrix();
    }
    WeightMap dw(grad->data() + l.weight_offset, l.out, l.in);
    Eigen::Map<Vector> db(grad->data() + l.bias_offset, l.out);
    dw.noalias() += delta * post[kk].transpose();
    db += delta.rowwise().sum();
    if (kk > 0) {
      ConstWeightMap w(params_.data() + l.weight_offset, l.out, l.in);
      delta = w.transpose() * delta;
    }
  }
}

template <typename Scalar>
void ActorCritic<Scalar>::Backward(const Trace& trace, const Matrix& d_mean,
                                   const RowVector& d_value,
                                   Vector* grad) const {
  if (grad->size() != params_.size()) grad->setZero(params_.size());
  if (d_mean.size() > 0) {
    BackNetwork(actor_, true, trace.actor_pre, trace.actor_post, d_mean, grad);
  }
  if (d_value.size() > 0) {
    BackNetwork(critic_, false, trace.critic_pre, trace.critic_post,
                Matrix(d_value), grad);
  }
}

// Diagonal Gaussian log-density of `x` around `mean` with per-dimension
// log standard deviation.
template <typename Scalar, typename MeanVec, typename XVec, typename StdVec>
Scalar GaussianLogProb(const MeanVec& mean, const XVec& x,
                       const StdVec& log_std) {
  const Scalar half_log_2pi =
      Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  Scalar lp = 0;
  for (int j = 0; j < mean.size(); ++j) {
    const Scalar z = (x[j] - mean[j]) / std::exp(log_std[j]);
    lp += Scalar(-0.5) * z * z - log_std[j] - half_log_2pi;
  }
  return lp;
}

}  // namespace auvrl

#endif  // AUVRL_ACTOR_CRITIC_HPP_
