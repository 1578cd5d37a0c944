#ifndef AUVRL_BENCHMARK_HPP_
#define AUVRL_BENCHMARK_HPP_

#include <cstdint>

#include "auvrl/swim_env.hpp"

namespace auvrl {

struct BenchmarkResult {
  int num_envs = 0;
  int num_workers = 0;
  long long env_steps = 0;  // control steps summed over environments
  double seconds = 0.0;
  double steps_per_second = 0.0;
};

// Steps the batched environment with uniform random actions (drawn before
// the clock starts) and resets finished episodes, as training would.
BenchmarkResult RunThroughputBenchmark(const EnvConfig& config, int steps,
                                       std::uint64_t seed);

}  // namespace auvrl

#endif  // AUVRL_BENCHMARK_HPP_
