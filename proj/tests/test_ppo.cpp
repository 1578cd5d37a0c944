#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "auvrl/errors.hpp"
#include "auvrl/ppo.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace auvrl {
namespace {

using test::GaeOracle;

using NetD = ActorCritic<double>;

double Elu(double x) { return x > 0 ? x : std::expm1(x); }

const ParamBlock& Block(const NetD& net, const std::string& name) {
  for (const ParamBlock& b : net.blocks()) {
    if (b.name == name) return b;
  }
  FAIL("no block " << name);
  return net.blocks().front();
}

NetD RandomNet(Rng& rng, std::vector<int> hidden, double scale = 1.0) {
  NetD net(NetworkSpec{kObsDim, hidden, kActDim});
  for (Eigen::Index i = 0; i < net.params().size(); ++i) {
    net.params()[i] = Uniform(rng, -scale, scale);
  }
  for (int j = 0; j < kActDim; ++j) net.log_std()[j] = Uniform(rng, -1.0, 0.5);
  return net;
}

NetD::Matrix RandomMatrix(Rng& rng, int rows, int cols, double scale) {
  NetD::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = Uniform(rng, -scale, scale);
  return m;
}

TEST_CASE("zero network outputs zero") {
  NetD net;
  net.params().setZero();
  NetD::Matrix obs = NetD::Matrix::Ones(kObsDim, 3);
  NetD::Matrix mean;
  NetD::RowVector value;
  net.Forward(obs, &mean, &value);
  CHECK(mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK(value.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-computed forward pass of a one-unit network") {
  NetD net(NetworkSpec{kObsDim, {1, 1}, kActDim});
  net.params().setZero();
  auto set = [&](const std::string& name, std::vector<double> v) {
    const ParamBlock& b = Block(net, name);
    REQUIRE(static_cast<int>(v.size()) == b.size());
    for (int i = 0; i < b.size(); ++i) net.params()[b.offset + i] = v[i];
  };
  std::vector<double> w0(kObsDim);
  for (int i = 0; i < kObsDim; ++i) w0[i] = 0.1 * (i + 1) * (i % 2 ? -1 : 1);
  set("actor.0.weight", w0);
  set("actor.0.bias", {0.3});
  set("actor.1.weight", {-1.5});
  set("actor.1.bias", {0.2});
  set("actor.2.weight", {0.5, -0.5, 1.0, -1.0, 2.0, 0.0});
  set("actor.2.bias", {0.0, 0.1, -0.1, 0.2, -0.2, 0.3});
  set("critic.0.weight", std::vector<double>(kObsDim, -0.05));
  set("critic.0.bias", {0.1});
  set("critic.1.weight", {2.0});
  set("critic.1.bias", {-0.4});
  set("critic.2.weight", {0.7});
  set("critic.2.bias", {0.25});

  std::vector<double> x(kObsDim);
  for (int i = 0; i < kObsDim; ++i) x[i] = 0.05 * i - 0.3;

  // pencil-and-paper evaluation
  double pre = 0.3;
  for (int i = 0; i < kObsDim; ++i) pre += w0[i] * x[i];
  const double h2 = Elu(-1.5 * Elu(pre) + 0.2);
  const double out_w[] = {0.5, -0.5, 1.0, -1.0, 2.0, 0.0};
  const double out_b[] = {0.0, 0.1, -0.1, 0.2, -0.2, 0.3};
  double cpre = 0.1;
  for (int i = 0; i < kObsDim; ++i) cpre += -0.05 * x[i];
  const double value = 0.7 * Elu(2.0 * Elu(cpre) - 0.4) + 0.25;

  std::vector<double> mean(kActDim);
  double v = 0.0;
  net.Forward(std::span<const double>(x), std::span<double>(mean), &v);
  for (int j = 0; j < kActDim; ++j) {
    CHECK(std::abs(mean[j] - std::tanh(out_w[j] * h2 + out_b[j])) < 1e-12);
  }
  CHECK(std::abs(v - value) < 1e-12);
}

TEST_CASE("batched forward equals single forwards") {
  Rng rng = MakeStream(50, 0);
  Policy net;
  net.Initialize(rng);
  Policy::Matrix obs(kObsDim, 64);
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    obs(i) = static_cast<float>(Uniform(rng, -2.0, 2.0));
  }
  Policy::Matrix mean;
  Policy::RowVector value;
  net.Forward(obs, &mean, &value);
  for (int c = 0; c < 64; ++c) {
    std::vector<float> x(obs.col(c).data(), obs.col(c).data() + kObsDim);
    std::vector<float> m(kActDim);
    float v = 0;
    net.Forward(std::span<const float>(x), std::span<float>(m), &v);
    for (int j = 0; j < kActDim; ++j) {
      CHECK(m[j] == doctest::Approx(mean(j, c)).epsilon(1e-6));
      CHECK(std::abs(m[j]) < 1.0f);
    }
    CHECK(v == doctest::Approx(value(c)).epsilon(1e-5));
  }
  std::vector<float> short_obs(5), m(kActDim);
  CHECK_THROWS_AS(net.Forward(std::span<const float>(short_obs),
                              std::span<float>(m), nullptr),
                  InvalidArgument);
}

TEST_CASE("initialization") {
  Rng rng = MakeStream(51, 0);
  Policy net;
  net.Initialize(rng, 0.0);
  CHECK(net.AllFinite());
  for (int j = 0; j < kActDim; ++j) CHECK(net.log_std()[j] == 0.0f);
  const ParamBlock* first = nullptr;
  for (const ParamBlock& b : net.blocks()) {
    if (b.name == "actor.0.weight") first = &b;
  }
  REQUIRE(first != nullptr);
  const float bound = 1.0f / std::sqrt(static_cast<float>(kObsDim));
  for (int i = 0; i < first->size(); ++i) {
    CHECK(std::abs(net.params()[first->offset + i]) <= bound);
  }
}

TEST_CASE("action sampling") {
  Rng rng = MakeStream(52, 0);
  Vec6 mean;
  mean << 0.1, -0.2, 0.9, -0.95, 0.0, 0.5;
  Vec6 log_std;
  log_std << -0.5, 0.0, -1.0, -2.0, 0.3, -0.1;

  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  for (int i = 0; i < 1000; ++i) {
    const ActionSample s = SampleAction(mean, log_std, rng);
    double lp = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double sigma = std::exp(log_std[j]);
      const double z = (s.draw[j] - mean[j]) / sigma;
      lp += -0.5 * z * z - std::log(sigma) - half_log_2pi;
      CHECK(s.action[j] == std::clamp(s.draw[j], -1.0, 1.0));
    }
    CHECK(std::abs(s.log_prob - lp) < 1e-9);
  }

  // density at the mean
  double at_mean = 0.0;
  for (int j = 0; j < 6; ++j) at_mean += -0.5 * (std::log(2 * std::numbers::pi) + 2 * log_std[j]);
  CHECK(GaussianLogProb<double>(mean, mean, log_std) ==
        doctest::Approx(at_mean).epsilon(1e-14));

  // vanishing variance collapses onto the clamped mean
  Vec6 wide_mean;
  wide_mean << 1.5, -0.3, 0.0, -2.0, 0.7, 1.0;
  const ActionSample det =
      SampleAction(wide_mean, Vec6::Constant(-40.0), rng);
  for (int j = 0; j < 6; ++j) {
    CHECK(det.action[j] == doctest::Approx(std::clamp(wide_mean[j], -1.0, 1.0)));
  }

  // Monte Carlo spread of the pre-clamp draws
  const int n = 100000;
  Vec6 sum = Vec6::Zero(), sq = Vec6::Zero();
  for (int i = 0; i < n; ++i) {
    const ActionSample s = SampleAction(mean, log_std, rng);
    sum += s.draw;
    sq += s.draw.cwiseProduct(s.draw);
  }
  for (int j = 0; j < 6; ++j) {
    const double m = sum[j] / n;
    const double sd = std::sqrt(sq[j] / n - m * m);
    CHECK(std::abs(sd / std::exp(log_std[j]) - 1.0) <= 0.02);
  }

  Rng a = MakeStream(9, 9), b = MakeStream(9, 9);
  CHECK(SampleAction(mean, log_std, a).draw == SampleAction(mean, log_std, b).draw);
}

TEST_CASE("GAE examples") {
  {
    const std::vector<double> r{1}, v{0}, boot{0};
    const std::vector<std::uint8_t> d{1};
    const GaeResult g = ComputeGae(r, v, d, boot, 1, 1, 0.99, 0.95);
    CHECK(g.advantages[0] == 1.0);
  }
  {
    const std::vector<double> r{1, 1, 1}, v{0, 0, 0}, boot{0};
    const std::vector<std::uint8_t> d{0, 0, 0};
    const GaeResult g = ComputeGae(r, v, d, boot, 3, 1, 0.99, 0.95);
    const double gl = 0.99 * 0.95;
    CHECK(std::abs(g.advantages[0] - (1 + gl * (1 + gl))) < 1e-12);
    CHECK(g.advantages[0] == doctest::Approx(2.825).epsilon(1e-4));
  }
}

TEST_CASE("GAE matches brute-force sums on random instances") {
  Rng rng = MakeStream(53, 0);
  double worst = 0.0, worst_mc = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const int T = 1 + static_cast<int>(Uniform(rng, 0.0, 16.0 - 1e-9));
    const int N = 1 + static_cast<int>(Uniform(rng, 0.0, 4.0 - 1e-9));
    const double gamma = Uniform(rng, 0.5, 1.0);
    const double lambda = Uniform(rng, 0.0, 1.0);
    std::vector<double> r(T * N), v(T * N), boot(N);
    std::vector<std::uint8_t> d(T * N);
    for (int i = 0; i < T * N; ++i) {
      r[i] = Uniform(rng, -2.0, 2.0);
      v[i] = Uniform(rng, -5.0, 5.0);
      d[i] = Uniform(rng, 0.0, 1.0) < 0.2;
    }
    for (double& b : boot) b = Uniform(rng, -5.0, 5.0);

    const GaeResult got = ComputeGae(r, v, d, boot, T, N, gamma, lambda);
    const GaeResult want = GaeOracle(r, v, d, boot, T, N, gamma, lambda);
    for (int i = 0; i < T * N; ++i) {
      worst = std::max(worst, std::abs(got.advantages[i] - want.advantages[i]));
      worst = std::max(worst, std::abs(got.returns[i] - want.returns[i]));
    }

    // lambda = 1: discounted Monte Carlo return minus the baseline
    const GaeResult mc = ComputeGae(r, v, d, boot, T, N, gamma, 1.0);
    for (int n = 0; n < N; ++n) {
      for (int t = 0; t < T; ++t) {
        double ret = 0.0, disc = 1.0;
        bool cut = false;
        for (int k = t; k < T; ++k) {
          ret += disc * r[k * N + n];
          if (d[k * N + n]) {
            cut = true;
            break;
          }
          disc *= gamma;
        }
        if (!cut) ret += disc * boot[n];
        worst_mc = std::max(
            worst_mc, std::abs(mc.advantages[t * N + n] - (ret - v[t * N + n])));
      }
    }
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_mc <= 1e-10);
}

TEST_CASE("advantage normalization") {
  std::vector<double> a{1, 2, 3, 4, 10};
  NormalizeAdvantages(&a);
  double mean = 0, var = 0;
  for (double x : a) mean += x;
  mean /= a.size();
  for (double x : a) var += (x - mean) * (x - mean);
  var /= a.size();
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> flat(7, 3.5);
  NormalizeAdvantages(&flat);
  for (double x : flat) CHECK(x == 0.0);
}

struct Batch {
  NetD::Matrix obs, actions;
  std::vector<double> old_lp, adv, ret;
};

Batch RandomBatch(Rng& rng, const NetD& net, int size, double lp_jitter) {
  Batch b;
  b.obs = RandomMatrix(rng, kObsDim, size, 1.5);
  NetD::Matrix mean;
  net.Forward(b.obs, &mean, nullptr);
  b.actions = mean + RandomMatrix(rng, kActDim, size, 0.8);
  Vec6 ls;
  for (int j = 0; j < 6; ++j) ls[j] = net.log_std()[j];
  for (int i = 0; i < size; ++i) {
    const Vec6 m = mean.col(i);
    const Vec6 x = b.actions.col(i);
    b.old_lp.push_back(GaussianLogProb<double>(m, x, ls) +
                       Uniform(rng, -lp_jitter, lp_jitter));
    b.adv.push_back(Uniform(rng, -2.0, 2.0));
    b.ret.push_back(Uniform(rng, -3.0, 3.0));
  }
  return b;
}

TEST_CASE("surrogate at the identity ratio") {
  Rng rng = MakeStream(54, 0);
  const NetD net = RandomNet(rng, {8, 8}, 0.5);
  const Batch b = RandomBatch(rng, net, 32, 0.0);
  PpoConfig cfg;
  const LossStats s = PpoLoss(net, b.obs, b.actions, b.old_lp, b.adv, b.ret, cfg,
                              nullptr);
  double mean_adv = 0;
  for (double a : b.adv) mean_adv += a;
  mean_adv /= b.adv.size();
  CHECK(s.policy == doctest::Approx(-mean_adv).epsilon(1e-10));
  CHECK(s.mean_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.clip_fraction == 0.0);
}

TEST_CASE("PPO loss gradient matches central differences") {
  Rng rng = MakeStream(55, 0);
  double worst = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<int> hidden =
        trial % 2 ? std::vector<int>{1, 1} : std::vector<int>{1};
    NetD net = RandomNet(rng, hidden, 1.0);
    const Batch b = RandomBatch(rng, net, 8, 0.4);
    PpoConfig cfg;
    cfg.clip = Uniform(rng, 0.1, 0.3);
    cfg.value_coef = Uniform(rng, 0.5, 1.5);
    cfg.entropy_coef = Uniform(rng, 0.0, 0.02);

    NetD::Vector grad;
    PpoLoss(net, b.obs, b.actions, b.old_lp, b.adv, b.ret, cfg, &grad);
    const double h = 1e-6;
    for (int p = 0; p < net.num_params(); ++p) {
      const double saved = net.params()[p];
      net.params()[p] = saved + h;
      const double up =
          PpoLoss(net, b.obs, b.actions, b.old_lp, b.adv, b.ret, cfg, nullptr)
              .total;
      net.params()[p] = saved - h;
      const double down =
          PpoLoss(net, b.obs, b.actions, b.old_lp, b.adv, b.ret, cfg, nullptr)
              .total;
      net.params()[p] = saved;
      const double fd = (up - down) / (2 * h);
      const double err = std::abs(fd - grad[p]) /
                         std::max({std::abs(fd), std::abs(grad[p]), 1e-3});
      worst = std::max(worst, err);
      ++checked;
    }
  }
  INFO("worst relative error " << worst << " over " << checked << " parameters");
  CHECK(worst < 1e-4);
}

TEST_CASE("zero clip range stops the gradient on the clipped branch") {
  Rng rng = MakeStream(56, 0);
  NetD net = RandomNet(rng, {4, 4}, 0.7);
  PpoConfig cfg;
  cfg.clip = 0.0;
  cfg.value_coef = 0.0;
  cfg.entropy_coef = 0.0;
  int clipped = 0, open = 0;
  for (int i = 0; i < 200; ++i) {
    const Batch b = RandomBatch(rng, net, 1, 0.5);
    NetD::Vector grad;
    const LossStats s =
        PpoLoss(net, b.obs, b.actions, b.old_lp, b.adv, b.ret, cfg, &grad);
    const double ratio = s.mean_ratio;
    const double a = b.adv[0];
    if (ratio * a > a) {
      ++clipped;
      CHECK(grad.cwiseAbs().maxCoeff() == 0.0);
    } else if (ratio * a < a) {
      ++open;
      CHECK(grad.cwiseAbs().maxCoeff() > 0.0);
    }
  }
  CHECK(clipped > 20);
  CHECK(open > 20);
}

TEST_CASE("adam with bias correction") {
  Adam adam(3);
  Eigen::VectorXd p(3), g(3);
  p << 1.0, -2.0, 0.5;
  g << 0.3, -4.0, 1e-3;
  const Eigen::VectorXd start = p;
  adam.Step(&p, g, 0.01);
  // first step: m_hat = g, v_hat = g^2
  for (int i = 0; i < 3; ++i) {
    const double expected = start[i] - 0.01 * g[i] / (std::abs(g[i]) + 1e-8);
    CHECK(p[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  // second step, oracle with explicit moment bookkeeping
  Eigen::VectorXd g2(3);
  g2 << -0.1, 2.0, 5.0;
  const Eigen::VectorXd before = p;
  adam.Step(&p, g2, 0.01);
  for (int i = 0; i < 3; ++i) {
    const double m = 0.9 * (0.1 * g[i]) + 0.1 * g2[i];
    const double v = 0.999 * (0.001 * g[i] * g[i]) + 0.001 * g2[i] * g2[i];
    const double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
    CHECK(p[i] == doctest::Approx(before[i] - 0.01 * mh / (std::sqrt(vh) + 1e-8))
                      .epsilon(1e-12));
  }
}

EnvConfig TinyEnv(int n, int workers) {
  EnvConfig e;
  e.num_envs = n;
  e.num_workers = workers;
  return e;
}

PpoConfig TinyPpo() {
  PpoConfig p;
  p.horizon = 16;
  p.minibatches = 2;
  p.epochs = 2;
  p.hidden = {32, 32};
  return p;
}

TEST_CASE("update aborts on non-finite loss and restores parameters") {
  Trainer trainer(TinyEnv(8, 1), TinyPpo(), 3);
  trainer.RunIteration();
  Policy& policy = trainer.mutable_policy();
  const Policy::Vector before = policy.params();

  RolloutBuffer buffer(4, 2);
  buffer.observations.setRandom();
  buffer.actions.setRandom();
  std::fill(buffer.log_probs.begin(), buffer.log_probs.end(), -5.0);
  std::vector<double> adv(8, 1.0), ret(8, NAN);
  adv[0] = 2.0;
  PpoUpdater updater(TinyPpo(), policy.num_params());
  Rng rng = MakeStream(57, 0);
  CHECK_THROWS_AS(updater.Update(&policy, buffer, adv, ret, rng), RuntimeFailure);
  CHECK(std::memcmp(before.data(), policy.params().data(),
                    before.size() * sizeof(float)) == 0);
}

TEST_CASE("trainer lifecycle and determinism") {
  Trainer a(TinyEnv(8, 1), TinyPpo(), 11);
  Trainer b(TinyEnv(8, 1), TinyPpo(), 11);
  Trainer c(TinyEnv(8, 3), TinyPpo(), 11);
  for (int it = 0; it < 3; ++it) {
    const IterationLog la = a.RunIteration();
    const IterationLog lb = b.RunIteration();
    const IterationLog lc = c.RunIteration();
    CHECK(la.iteration == it);
    CHECK(la.env_steps == (it + 1) * 16 * 8);
    CHECK(la.norm_mean_reward == lb.norm_mean_reward);
    CHECK(la.policy_loss == lb.policy_loss);
    CHECK(la.value_loss == lc.value_loss);
    CHECK(la.policy_loss == lc.policy_loss);
  }
  CHECK(a.log().size() == 3);
  CHECK(a.policy().AllFinite());
  const auto& pa = a.policy().params();
  CHECK(std::memcmp(pa.data(), b.policy().params().data(),
                    pa.size() * sizeof(float)) == 0);
  CHECK(std::memcmp(pa.data(), c.policy().params().data(),
                    pa.size() * sizeof(float)) == 0);
}

TEST_CASE("one clipped epoch keeps the mean ratio near one") {
  PpoConfig cfg = TinyPpo();
  cfg.epochs = 1;
  Trainer t(TinyEnv(64, 1), cfg, 12);
  for (int it = 0; it < 5; ++it) {
    const IterationLog log = t.RunIteration();
    CHECK(log.mean_ratio >= 1.0 - 2 * cfg.clip);
    CHECK(log.mean_ratio <= 1.0 + 2 * cfg.clip);
  }
}

TEST_CASE("config validation") {
  PpoConfig c;
  CHECK_NOTHROW(c.Validate());
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = PpoConfig{};
  c.lambda = 1.5;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = PpoConfig{};
  c.clip = 1.0;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = PpoConfig{};
  c.horizon = 0;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = PpoConfig{};
  c.hidden = {};
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
}

}  // namespace
}  // namespace auvrl
