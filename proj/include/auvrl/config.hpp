#ifndef AUVRL_CONFIG_HPP_
#define AUVRL_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "auvrl/ppo.hpp"
#include "auvrl/swim_env.hpp"

namespace auvrl {

// Everything a training run depends on. Written back out as the resolved
// config snapshot; loading that snapshot reproduces the run.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "runs/default";
  EnvConfig env;
  PpoConfig ppo;

  void Validate() const;
};

// Parses YAML text. `source` names the input in diagnostics. Overrides are
// "dotted.key=value" strings applied before validation, e.g.
// "ppo.iterations=10" or "environment.num_envs=8". Unknown keys, wrong
// types and out-of-range values raise InputError with line/key location.
RunConfig ParseRunConfig(const std::string& yaml_text,
                         const std::string& source = "<config>",
                         const std::vector<std::string>& overrides = {});

RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::string>& overrides = {});

// Fully resolved config as YAML, every field present, doubles printed in
// shortest round-trip form.
std::string DumpRunConfig(const RunConfig& config);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace auvrl

#endif  // AUVRL_CONFIG_HPP_
