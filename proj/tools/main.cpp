// auvrl: train, evaluate and replay underwater-vehicle velocity controllers.
//
// Exit codes: 0 success, 2 bad input (files, flags, schema), 3 runtime
// failure (training abort, divergence, I/O, summary mismatch).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "auvrl/benchmark.hpp"
#include "auvrl/checkpoint.hpp"
#include "auvrl/config.hpp"
#include "auvrl/errors.hpp"
#include "auvrl/evaluation.hpp"
#include "auvrl/replay.hpp"
#include "auvrl/scenario.hpp"
#include "auvrl/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string scenario;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  std::string metrics;
  std::string summary;
  int stride = 5;
  int steps = 200;
  bool quiet = false;
};

auvrl::RunConfig ResolveConfig(const Options& o) {
  auvrl::RunConfig cfg =
      o.config.empty() ? auvrl::ParseRunConfig("{}", "<defaults>", o.overrides)
                       : auvrl::LoadRunConfig(o.config, o.overrides);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

int Train(const Options& o) {
  const auvrl::RunConfig cfg = ResolveConfig(o);
  if (!o.quiet) {
    std::printf("training: %d envs, %d iterations, seed %llu -> %s\n",
                cfg.env.num_envs, cfg.ppo.iterations,
                static_cast<unsigned long long>(cfg.seed),
                cfg.output_dir.c_str());
  }
  auto progress = [&](const auvrl::IterationLog& e) {
    if (o.quiet) return;
    std::printf("iter %4d  %7.1fs  reward %.4f  policy %+.4f  value %.4f  "
                "entropy %.3f  clip %.3f\n",
                e.iteration, e.wall_s, e.norm_mean_reward, e.policy_loss,
                e.value_loss, e.entropy, e.clip_frac);
    std::fflush(stdout);
  };
  const auvrl::TrainingResult r =
      auvrl::RunTraining(cfg, cfg.output_dir, progress);
  std::printf("wrote %s\nwrote %s\nwrote %s\n", r.resolved_config_path.c_str(),
              r.csv_path.c_str(), r.checkpoint_path.c_str());
  return kExitOk;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw auvrl::RuntimeFailure("cannot write " + path.string());
}

int Eval(const Options& o) {
  const auvrl::RunConfig cfg = ResolveConfig(o);
  auvrl::ScenarioSpec scenario = auvrl::LoadScenario(o.scenario);
  if (o.seed) scenario.attitude.seed = *o.seed;
  const auvrl::PolicySnapshot snap = auvrl::LoadCheckpoint(o.checkpoint);

  const auvrl::EvalResult r = auvrl::Evaluate(snap.policy, scenario, cfg.env);
  const fs::path dir = o.out.empty() ? fs::path("eval") / scenario.id
                                     : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw auvrl::RuntimeFailure("cannot create " + dir.string());
  auvrl::WriteMetricsCsv((dir / "metrics.csv").string(), r.rows);
  WriteFile(dir / "summary.json", auvrl::SummaryToJson(r.summary));

  const auvrl::Summary& s = r.summary;
  std::printf("scenario %s: %s in %.2f s\n", scenario.id.c_str(),
              s.completed ? "completed" : "NOT completed", s.completion_time);
  std::printf("  rms velocity error [m/s]: %.4f %.4f %.4f\n",
              s.rms_velocity_error[0], s.rms_velocity_error[1],
              s.rms_velocity_error[2]);
  std::printf("  attitude error [deg]: mean %.2f  max %.2f\n",
              s.attitude_error_mean_deg, s.attitude_error_max_deg);
  std::printf("  max cross-track [m]: %.3f\n", s.max_cross_track);
  std::printf("wrote %s\n", dir.string().c_str());
  return kExitOk;
}

int Replay(const Options& o) {
  std::optional<std::string> stored;
  if (!o.summary.empty()) stored = o.summary;
  const fs::path out =
      o.out.empty() ? fs::path(o.metrics).parent_path() / "replay"
                    : fs::path(o.out);
  const auvrl::ReplayResult r =
      auvrl::Replay(o.metrics, out.string(), o.stride, stored);
  for (const auto& f : r.files) std::printf("wrote %s\n", f.c_str());
  if (r.distance) {
    std::printf("summary difference: %.3g\n", *r.distance);
    if (!(*r.distance <= 1e-9)) {
      std::fprintf(stderr, "error: recomputed summary differs from %s\n",
                   o.summary.c_str());
      return kExitRuntime;
    }
  }
  return kExitOk;
}

int Bench(const Options& o) {
  const auvrl::RunConfig cfg = ResolveConfig(o);
  const auvrl::BenchmarkResult r =
      auvrl::RunThroughputBenchmark(cfg.env, o.steps, cfg.seed);
  std::printf("{\"num_envs\": %d, \"num_workers\": %d, \"env_steps\": %lld, "
              "\"seconds\": %.4f, \"steps_per_second\": %.1f}\n",
              r.num_envs, r.num_workers, r.env_steps, r.seconds,
              r.steps_per_second);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Velocity-control policies for a 6-DOF underwater vehicle"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run config (YAML)");
    sub->add_option("--override", o.overrides,
                    "dotted.key=value applied on top of the config")
        ->take_all();
    sub->add_option("--seed", o.seed, "seed override");
    sub->add_option("--out", o.out, "output directory");
  };

  CLI::App* train = app.add_subcommand("train", "train a policy with PPO");
  add_common(train);
  train->add_flag("--quiet", o.quiet, "no per-iteration output");

  CLI::App* eval = app.add_subcommand("eval", "run a scenario with LOS guidance");
  add_common(eval);
  eval->add_option("--checkpoint", o.checkpoint, "policy checkpoint")
      ->required();
  eval->add_option("--scenario", o.scenario, "scenario file (YAML)")
      ->required();

  CLI::App* replay =
      app.add_subcommand("replay", "derive traces and summary from metrics");
  replay->add_option("metrics", o.metrics, "metrics CSV from eval")->required();
  replay->add_option("--summary", o.summary,
                     "stored summary.json to verify against");
  replay->add_option("--out", o.out, "output directory");
  replay->add_option("--stride", o.stride, "keep every n-th row");

  CLI::App* bench =
      app.add_subcommand("bench", "measure batched environment throughput");
  add_common(bench);
  bench->add_option("--steps", o.steps, "control steps per environment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*train) return Train(o);
    if (*eval) return Eval(o);
    if (*replay) return Replay(o);
    if (*bench) return Bench(o);
  } catch (const auvrl::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const auvrl::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const auvrl::InvalidParameters& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitInput;
}
