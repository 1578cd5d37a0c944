#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "auvrl/benchmark.hpp"
#include "auvrl/checkpoint.hpp"
#include "auvrl/config.hpp"
#include "auvrl/errors.hpp"
#include "auvrl/evaluation.hpp"
#include "auvrl/metrics.hpp"
#include "auvrl/ppo.hpp"
#include "auvrl/scenario.hpp"
#include "auvrl/swim_env.hpp"
#include "auvrl/training.hpp"

namespace py = pybind11;

namespace auvrl {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Quat ToQuat(const Array& a) {
  if (a.ndim() != 1 || a.shape(0) != 4) {
    throw InvalidArgument("quaternion must have shape (4,)");
  }
  return {a.at(0), a.at(1), a.at(2), a.at(3)};
}

Vec3 ToVec3(const Array& a) {
  if (a.ndim() != 1 || a.shape(0) != 3) {
    throw InvalidArgument("vector must have shape (3,)");
  }
  return {a.at(0), a.at(1), a.at(2)};
}

Array FromQuat(const Quat& q) {
  Array out(4);
  auto v = out.mutable_unchecked<1>();
  v(0) = q.w;
  v(1) = q.x;
  v(2) = q.y;
  v(3) = q.z;
  return out;
}

Array Rows(const std::vector<double>& data, py::ssize_t rows, py::ssize_t cols) {
  Array out({rows, cols});
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(double));
  return out;
}

template <typename T>
py::array_t<T> Vector(const std::vector<T>& data) {
  py::array_t<T> out(static_cast<py::ssize_t>(data.size()));
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(T));
  return out;
}

py::object JsonLoads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

py::dict LogRow(const IterationLog& e) {
  py::dict d;
  d["iteration"] = e.iteration;
  d["wall_s"] = e.wall_s;
  d["env_steps"] = e.env_steps;
  d["norm_mean_reward"] = e.norm_mean_reward;
  d["policy_loss"] = e.policy_loss;
  d["value_loss"] = e.value_loss;
  d["entropy"] = e.entropy;
  d["clip_frac"] = e.clip_frac;
  return d;
}

class PyEnv {
 public:
  PyEnv(const RunConfig& config, std::uint64_t seed)
      : env_(config.env, seed) {}

  int num_envs() const { return env_.num_envs(); }

  Array ResetAll() {
    return Rows(env_.ResetAll(), env_.num_envs(), kObsDim);
  }

  Array Reset(const std::vector<int>& indices) {
    return Rows(env_.Reset(indices), env_.num_envs(), kObsDim);
  }

  py::tuple Step(const Array& actions) {
    if (actions.ndim() != 2 || actions.shape(0) != env_.num_envs() ||
        actions.shape(1) != kActDim) {
      throw InvalidArgument("actions must have shape (num_envs, 6)");
    }
    const StepBatch* out = nullptr;
    {
      py::gil_scoped_release release;
      out = &env_.Step(std::span<const double>(actions.data(), actions.size()));
    }
    return py::make_tuple(Rows(out->observations, env_.num_envs(), kObsDim),
                          Vector(out->rewards), Vector(out->dones),
                          Vector(out->timeouts));
  }

 private:
  SwimEnv env_;
};

}  // namespace
}  // namespace auvrl

PYBIND11_MODULE(_core, m) {
  using namespace auvrl;
  m.doc() = "Underwater vehicle attitude and velocity control with PPO.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<InvalidParameters>(m, "InvalidParameters", PyExc_ValueError);
  py::register_exception<RuntimeFailure>(m, "RuntimeFailure", PyExc_RuntimeError);

  m.attr("OBS_DIM") = kObsDim;
  m.attr("ACT_DIM") = kActDim;

  m.def("hamilton_product", [](const Array& a, const Array& b) {
    return FromQuat(HamiltonProduct(ToQuat(a), ToQuat(b)));
  });
  m.def("quat_angle", [](const Array& q_d, const Array& q) {
    return QuatAngle(ToQuat(q_d), ToQuat(q));
  }, "Geodesic angle in rad between two attitudes.");
  m.def("integrate_attitude", [](const Array& q, const Array& omega, double dt) {
    return FromQuat(IntegrateAttitude(ToQuat(q), ToVec3(omega), dt));
  }, py::arg("q"), py::arg("omega"), py::arg("dt"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_property_readonly("num_envs", [](const RunConfig& c) { return c.env.num_envs; })
      .def_property_readonly("iterations", [](const RunConfig& c) { return c.ppo.iterations; })
      .def("dump", &DumpRunConfig);

  m.def("load_config", &LoadRunConfig, py::arg("path"),
        py::arg("overrides") = std::vector<std::string>{});
  m.def("parse_config", &ParseRunConfig, py::arg("text"),
        py::arg("source") = "<config>",
        py::arg("overrides") = std::vector<std::string>{});

  py::class_<PyEnv>(m, "SwimEnv")
      .def(py::init<const RunConfig&, std::uint64_t>(), py::arg("config"),
           py::arg("seed"))
      .def_property_readonly("num_envs", &PyEnv::num_envs)
      .def("reset_all", &PyEnv::ResetAll)
      .def("reset", &PyEnv::Reset, py::arg("indices"))
      .def("step", &PyEnv::Step, py::arg("actions"),
           "Returns (observations, rewards, dones, timeouts).");

  m.def("compute_gae",
        [](const Array& rewards, const Array& values,
           const py::array_t<std::uint8_t>& dones, const Array& bootstrap,
           double gamma, double lambda) {
          if (rewards.ndim() != 2) throw InvalidArgument("rewards must be (T, N)");
          const int t = static_cast<int>(rewards.shape(0));
          const int n = static_cast<int>(rewards.shape(1));
          auto flat = [](const Array& a) {
            return std::vector<double>(a.data(), a.data() + a.size());
          };
          const std::vector<std::uint8_t> d(dones.data(), dones.data() + dones.size());
          const GaeResult g = ComputeGae(flat(rewards), flat(values), d,
                                         flat(bootstrap), t, n, gamma, lambda);
          return py::make_tuple(Rows(g.advantages, t, n), Rows(g.returns, t, n));
        },
        py::arg("rewards"), py::arg("values"), py::arg("dones"),
        py::arg("bootstrap"), py::arg("gamma"), py::arg("lam"));

  py::class_<PolicySnapshot>(m, "Checkpoint")
      .def_readonly("config_hash", &PolicySnapshot::config_hash)
      .def_readonly("format_version", &PolicySnapshot::format_version)
      .def_property_readonly("num_params",
                             [](const PolicySnapshot& s) { return s.policy.num_params(); })
      .def("act", [](const PolicySnapshot& s, const Array& obs) {
        if (obs.ndim() != 1 || obs.shape(0) != kObsDim) {
          throw InvalidArgument("observation must have shape (16,)");
        }
        Observation o;
        std::memcpy(o.data(), obs.data(), sizeof(o));
        const Vec6 a = DeterministicAction(s.policy, o);
        return Vector(std::vector<double>(a.data(), a.data() + kActDim));
      }, py::arg("observation"), "Deterministic (mean) action.");

  m.def("load_checkpoint", &LoadCheckpoint, py::arg("path"));

  m.def("train",
        [](const RunConfig& config, const std::string& out_dir) {
          TrainingResult r;
          {
            py::gil_scoped_release release;
            r = RunTraining(config, out_dir);
          }
          py::list rows;
          for (const IterationLog& e : r.log) rows.append(LogRow(e));
          return rows;
        },
        py::arg("config"), py::arg("out_dir"),
        "Runs training and returns the per-iteration log.");

  m.def("evaluate",
        [](const std::string& checkpoint, const std::string& scenario,
           const RunConfig& config) {
          const PolicySnapshot snap = LoadCheckpoint(checkpoint);
          const ScenarioSpec spec = LoadScenario(scenario);
          EvalResult r;
          {
            py::gil_scoped_release release;
            r = Evaluate(snap.policy, spec, config.env);
          }
          return py::make_tuple(JsonLoads(SummaryToJson(r.summary)),
                                FormatMetricsCsv(r.rows));
        },
        py::arg("checkpoint"), py::arg("scenario"), py::arg("config"),
        "Returns (summary dict, metrics CSV text).");

  m.def("summarize_metrics",
        [](const std::string& csv_text, double transient_s) {
          return JsonLoads(SummaryToJson(
              Summarize(ParseMetricsCsv(csv_text, "<metrics>"), transient_s)));
        },
        py::arg("csv_text"), py::arg("transient_s") = 3.0);

  m.def("benchmark",
        [](const RunConfig& config, int steps, std::uint64_t seed) {
          BenchmarkResult b;
          {
            py::gil_scoped_release release;
            b = RunThroughputBenchmark(config.env, steps, seed);
          }
          py::dict d;
          d["num_envs"] = b.num_envs;
          d["num_workers"] = b.num_workers;
          d["env_steps"] = b.env_steps;
          d["seconds"] = b.seconds;
          d["steps_per_second"] = b.steps_per_second;
          return d;
        },
        py::arg("config"), py::arg("steps") = 100, py::arg("seed") = 1);
}
