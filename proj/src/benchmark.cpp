#include "auvrl/benchmark.hpp"

#include <chrono>
#include <vector>

#include "auvrl/errors.hpp"
#include "auvrl/random.hpp"

namespace auvrl {

BenchmarkResult RunThroughputBenchmark(const EnvConfig& config, int steps,
                                       std::uint64_t seed) {
  if (steps < 1) throw InvalidArgument("benchmark needs at least one step");
  SwimEnv env(config, seed);
  const int n = env.num_envs();
  constexpr int kActionSets = 16;
  Rng rng = MakeStream(seed, ~0ull);
  std::vector<double> actions(static_cast<std::size_t>(kActionSets) * n *
                              kActDim);
  for (double& a : actions) a = Uniform(rng, -1.0, 1.0);

  env.ResetAll();
  std::vector<int> done;
  done.reserve(n);
  const auto start = std::chrono::steady_clock::now();
  for (int s = 0; s < steps; ++s) {
    const std::size_t offset =
        static_cast<std::size_t>(s % kActionSets) * n * kActDim;
    const StepBatch& out = env.Step(
        std::span<const double>(actions.data() + offset, n * kActDim));
    done.clear();
    for (int i = 0; i < n; ++i) {
      if (out.dones[i]) done.push_back(i);
    }
    if (!done.empty()) env.Reset(done);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  BenchmarkResult r;
  r.num_envs = n;
  r.num_workers = env.num_workers();
  r.env_steps = static_cast<long long>(steps) * n;
  r.seconds = seconds;
  r.steps_per_second = seconds > 0.0 ? r.env_steps / seconds : 0.0;
  return r;
}

}  // namespace auvrl
