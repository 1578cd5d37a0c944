#include "auvrl/training.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "auvrl/checkpoint.hpp"
#include "auvrl/errors.hpp"

namespace auvrl {

namespace fs = std::filesystem;

std::string TrainingCsvHeader() {
  return "iteration,wall_s,env_steps,norm_mean_reward,policy_loss,value_loss,"
         "entropy,clip_frac";
}

std::string FormatTrainingCsvRow(const IterationLog& e) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%.3f,%lld,%.9g,%.9g,%.9g,%.9g,%.9g",
                e.iteration, e.wall_s, e.env_steps, e.norm_mean_reward,
                e.policy_loss, e.value_loss, e.entropy, e.clip_frac);
  return buf;
}

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw RuntimeFailure("cannot write " + path.string());
}

}  // namespace

TrainingResult RunTraining(const RunConfig& config, const std::string& out_dir,
                           const ProgressFn& progress) {
  config.Validate();
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + out_dir + ": " + ec.message());

  const std::string resolved = DumpRunConfig(config);
  const std::string hash = HashText(resolved);
  TrainingResult result;
  result.resolved_config_path = (dir / kResolvedConfigFile).string();
  result.csv_path = (dir / kTrainingCsvFile).string();
  result.checkpoint_path = (dir / kFinalCheckpointFile).string();
  WriteText(result.resolved_config_path, resolved);

  std::ofstream csv(result.csv_path, std::ios::binary);
  if (!csv) throw RuntimeFailure("cannot write " + result.csv_path);
  csv << TrainingCsvHeader() << "\n";

  Trainer trainer(config.env, config.ppo, config.seed);
  for (int it = 0; it < config.ppo.iterations; ++it) {
    const IterationLog entry = trainer.RunIteration();
    csv << FormatTrainingCsvRow(entry) << "\n" << std::flush;
    if (!csv) throw RuntimeFailure("write failed: " + result.csv_path);
    result.log.push_back(entry);
    if (progress) progress(entry);

    const int every = config.ppo.checkpoint_every;
    if (every > 0 && (entry.iteration + 1) % every == 0 &&
        it + 1 < config.ppo.iterations) {
      char name[64];
      std::snprintf(name, sizeof(name), "policy_iter%05d.ckpt",
                    entry.iteration + 1);
      const std::string path = (dir / name).string();
      SaveCheckpoint(path, PolicySnapshot{trainer.policy(), hash});
      result.intermediate_checkpoints.push_back(path);
    }
  }
  SaveCheckpoint(result.checkpoint_path, PolicySnapshot{trainer.policy(), hash});
  result.policy = trainer.policy();
  return result;
}

}  // namespace auvrl
