#ifndef AUVRL_TRAINING_HPP_
#define AUVRL_TRAINING_HPP_

#include <functional>
#include <string>
#include <vector>

#include "auvrl/config.hpp"
#include "auvrl/ppo.hpp"

namespace auvrl {

// Output files of a training run, relative to the run directory.
inline constexpr char kResolvedConfigFile[] = "config.resolved.yaml";
inline constexpr char kTrainingCsvFile[] = "training.csv";
inline constexpr char kFinalCheckpointFile[] = "policy.ckpt";

std::string TrainingCsvHeader();
std::string FormatTrainingCsvRow(const IterationLog& entry);

struct TrainingResult {
  std::string resolved_config_path;
  std::string csv_path;
  std::string checkpoint_path;                   // final policy
  std::vector<std::string> intermediate_checkpoints;
  std::vector<IterationLog> log;
  Policy policy;
};

using ProgressFn = std::function<void(const IterationLog&)>;

// Runs `config.ppo.iterations` PPO iterations and writes the resolved config
// snapshot, the per-iteration CSV and checkpoints into `out_dir` (created if
// missing). Checkpoints carry the hash of the resolved config text.
TrainingResult RunTraining(const RunConfig& config, const std::string& out_dir,
                           const ProgressFn& progress = {});

}  // namespace auvrl

#endif  // AUVRL_TRAINING_HPP_
