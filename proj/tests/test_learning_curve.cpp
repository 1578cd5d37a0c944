// Early learning behaviour of the full default configuration. Slow: five
// seeds of 20 iterations at 2048 environments.
#include <cstdio>
#include <filesystem>
#include <vector>

#include "auvrl/config.hpp"
#include "auvrl/ppo.hpp"
#include "doctest.h"

namespace auvrl {
namespace {

constexpr int kSeeds = 5;
constexpr int kIterations = 20;
constexpr double kRequiredFraction = 0.9;

double Slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sx += i;
    sy += y[i];
    sxx += static_cast<double>(i) * i;
    sxy += i * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TEST_CASE("normalized reward rises over the first 20 iterations") {
  const std::filesystem::path root = AUVRL_SOURCE_DIR;
  const RunConfig base = LoadRunConfig((root / "configs/default.yaml").string());
  int rising = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    Trainer trainer(base.env, base.ppo, seed);
    std::vector<double> r;
    int up_steps = 0;
    for (int it = 0; it < kIterations; ++it) {
      r.push_back(trainer.RunIteration().norm_mean_reward);
      if (it > 0 && r[it] > r[it - 1]) ++up_steps;
    }
    const double slope = Slope(r);
    const bool ok = r.back() > r.front() && slope > 0.0;
    if (ok) ++rising;
    std::printf("seed %d: %.4f -> %.4f, slope %.5f/iter, %d of %d steps up\n",
                seed, r.front(), r.back(), slope, up_steps, kIterations - 1);
  }
  CHECK(rising >= kRequiredFraction * kSeeds);
}

}  // namespace
}  // namespace auvrl
