#include "auvrl/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "auvrl/errors.hpp"
#include "yaml_section.hpp"

namespace auvrl {

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  // keep floats recognisable as floats in YAML
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

using internal::Section;

void ApplyOverride(YAML::Node root, const std::string& text,
                   const std::string& source) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InputError(source + " (override)",
                     "override must look like key=value: '" + text + "'");
  }
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) {
      throw InputError(source + " (override)", "empty key segment in " + key);
    }
    parts.push_back(part);
  }
  YAML::Node cur = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = cur[parts[i]];
    if (!next.IsDefined() || next.IsNull()) {
      cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = cur[parts[i]];
    }
    if (!next.IsMap()) {
      throw InputError(source + " (override)",
                       "'" + parts[i] + "' in " + key + " is not a section");
    }
    cur.reset(next);
  }
  try {
    cur[parts.back()] = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw InputError(source + " (override)",
                     "cannot parse value of " + key + ": " + e.what());
  }
}

void ParseVehicle(Section s, VehicleParams* v) {
  s.Get("mass_kg", &v->mass);
  s.GetMatrix("inertia_kg_m2", &v->inertia);
  s.GetMatrix("added_mass", &v->added_mass);
  s.GetList("linear_damping", 6, &v->linear_damping);
  s.GetList("quadratic_damping", 6, &v->quadratic_damping);
  s.Get("weight_n", &v->weight);
  s.Get("buoyancy_n", &v->buoyancy);
  s.GetList("cb_offset_m", 3, &v->r_cb);
  s.GetList("thrust_gain", 6, &v->thrust_gain);
  s.Finish();
}

void ParseEnvironment(Section s, EnvConfig* e) {
  s.Get("num_envs", &e->num_envs);
  s.Get("physics_dt_s", &e->physics_dt);
  s.Get("control_decimation", &e->control_decimation);
  s.Get("episode_length_s", &e->episode_length);
  s.Get("integral_limit", &e->integral_limit);
  s.Get("velocity_limit", &e->velocity_limit);
  s.Get("reference_speed_m_s", &e->reference_speed);
  s.Get("stagger_initial_clock", &e->stagger_initial_clock);
  s.Get("num_workers", &e->num_workers);

  Section traj = s.Child("trajectory");
  std::array<double, 3> coeff{e->trajectory.a, e->trajectory.b,
                              e->trajectory.c};
  traj.GetList("coefficients_m_s", 3, &coeff);
  e->trajectory.a = coeff[0];
  e->trajectory.b = coeff[1];
  e->trajectory.c = coeff[2];
  traj.Get("frequency_rad_s", &e->trajectory.frequency);
  traj.Finish();

  Section w = s.Child("reward_weights");
  w.Get("orientation", &e->weights.orientation);
  w.Get("angular_velocity", &e->weights.angular_velocity);
  w.Get("linear_velocity", &e->weights.linear_velocity);
  w.Get("action", &e->weights.action);
  w.Finish();

  Section r = s.Child("randomization");
  r.GetRange("mass_factor", &e->randomization.mass_factor);
  r.GetRange("buoyancy_factor", &e->randomization.buoyancy_factor);
  r.Get("cb_offset_radius_m", &e->randomization.cb_offset_radius);
  r.Finish();
  s.Finish();
}

void ParsePpo(Section s, PpoConfig* p) {
  s.Get("gamma", &p->gamma);
  s.Get("lambda", &p->lambda);
  s.Get("clip", &p->clip);
  s.Get("learning_rate", &p->learning_rate);
  s.Get("epochs", &p->epochs);
  s.Get("minibatches", &p->minibatches);
  s.Get("horizon", &p->horizon);
  s.Get("entropy_coef", &p->entropy_coef);
  s.Get("value_coef", &p->value_coef);
  s.Get("max_grad_norm", &p->max_grad_norm);
  s.Get("iterations", &p->iterations);
  s.Get("desired_kl", &p->desired_kl);
  s.Get("init_log_std", &p->init_log_std);
  s.Get("hidden", &p->hidden);
  s.Get("checkpoint_every", &p->checkpoint_every);
  s.Finish();
}

template <typename V>
std::string List(const V& v, int n) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += FormatDouble(v[i]);
  }
  return s + "]";
}

template <typename M>
std::string Nested(const M& m) {
  std::string s = "[";
  for (int r = 0; r < m.rows(); ++r) {
    if (r) s += ", ";
    s += List(m.row(r), static_cast<int>(m.cols()));
  }
  return s + "]";
}

}  // namespace

void RunConfig::Validate() const {
  env.Validate();
  ppo.Validate();
}

RunConfig ParseRunConfig(const std::string& yaml_text,
                         const std::string& source,
                         const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw InputError(source + ":" + std::to_string(e.mark.line + 1) + ":" +
                         std::to_string(e.mark.column + 1),
                     "YAML syntax error: " + e.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw InputError(source, "top level must be a mapping");
  for (const std::string& o : overrides) ApplyOverride(root, o, source);

  RunConfig cfg;
  Section top(root, "", &source);
  top.Get("seed", &cfg.seed);
  top.Get("output_dir", &cfg.output_dir);
  ParseVehicle(top.Child("vehicle"), &cfg.env.vehicle);
  ParseEnvironment(top.Child("environment"), &cfg.env);
  ParsePpo(top.Child("ppo"), &cfg.ppo);
  top.Finish();
  try {
    cfg.Validate();
  } catch (const InvalidArgument& e) {
    throw InputError(source, e.what());
  } catch (const InvalidParameters& e) {
    throw InputError(source + " vehicle", e.what());
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseRunConfig(buf.str(), path, overrides);
}

std::string DumpRunConfig(const RunConfig& c) {
  const VehicleParams& v = c.env.vehicle;
  const EnvConfig& e = c.env;
  const PpoConfig& p = c.ppo;
  std::ostringstream os;
  os << "seed: " << c.seed << "\n";
  os << "output_dir: \"" << c.output_dir << "\"\n";
  os << "vehicle:\n"
     << "  mass_kg: " << FormatDouble(v.mass) << "\n"
     << "  inertia_kg_m2: " << Nested(v.inertia) << "\n"
     << "  added_mass: " << Nested(v.added_mass) << "\n"
     << "  linear_damping: " << List(v.linear_damping, 6) << "\n"
     << "  quadratic_damping: " << List(v.quadratic_damping, 6) << "\n"
     << "  weight_n: " << FormatDouble(v.weight) << "\n"
     << "  buoyancy_n: " << FormatDouble(v.buoyancy) << "\n"
     << "  cb_offset_m: " << List(v.r_cb, 3) << "\n"
     << "  thrust_gain: " << List(v.thrust_gain, 6) << "\n";
  os << "environment:\n"
     << "  num_envs: " << e.num_envs << "\n"
     << "  physics_dt_s: " << FormatDouble(e.physics_dt) << "\n"
     << "  control_decimation: " << e.control_decimation << "\n"
     << "  episode_length_s: " << FormatDouble(e.episode_length) << "\n"
     << "  integral_limit: " << FormatDouble(e.integral_limit) << "\n"
     << "  velocity_limit: " << FormatDouble(e.velocity_limit) << "\n"
     << "  reference_speed_m_s: " << FormatDouble(e.reference_speed) << "\n"
     << "  stagger_initial_clock: "
     << (e.stagger_initial_clock ? "true" : "false") << "\n"
     << "  num_workers: " << e.num_workers << "\n"
     << "  trajectory:\n"
     << "    coefficients_m_s: "
     << List(std::array<double, 3>{e.trajectory.a, e.trajectory.b,
                                   e.trajectory.c},
             3)
     << "\n"
     << "    frequency_rad_s: " << FormatDouble(e.trajectory.frequency) << "\n"
     << "  reward_weights:\n"
     << "    orientation: " << FormatDouble(e.weights.orientation) << "\n"
     << "    angular_velocity: " << FormatDouble(e.weights.angular_velocity)
     << "\n"
     << "    linear_velocity: " << FormatDouble(e.weights.linear_velocity)
     << "\n"
     << "    action: " << FormatDouble(e.weights.action) << "\n"
     << "  randomization:\n"
     << "    mass_factor: "
     << List(std::array<double, 2>{e.randomization.mass_factor.first,
                                   e.randomization.mass_factor.second},
             2)
     << "\n"
     << "    buoyancy_factor: "
     << List(std::array<double, 2>{e.randomization.buoyancy_factor.first,
                                   e.randomization.buoyancy_factor.second},
             2)
     << "\n"
     << "    cb_offset_radius_m: "
     << FormatDouble(e.randomization.cb_offset_radius) << "\n";
  os << "ppo:\n"
     << "  gamma: " << FormatDouble(p.gamma) << "\n"
     << "  lambda: " << FormatDouble(p.lambda) << "\n"
     << "  clip: " << FormatDouble(p.clip) << "\n"
     << "  learning_rate: " << FormatDouble(p.learning_rate) << "\n"
     << "  epochs: " << p.epochs << "\n"
     << "  minibatches: " << p.minibatches << "\n"
     << "  horizon: " << p.horizon << "\n"
     << "  entropy_coef: " << FormatDouble(p.entropy_coef) << "\n"
     << "  value_coef: " << FormatDouble(p.value_coef) << "\n"
     << "  max_grad_norm: " << FormatDouble(p.max_grad_norm) << "\n"
     << "  iterations: " << p.iterations << "\n"
     << "  desired_kl: " << FormatDouble(p.desired_kl) << "\n"
     << "  init_log_std: " << FormatDouble(p.init_log_std) << "\n"
     << "  hidden: [";
  for (std::size_t i = 0; i < p.hidden.size(); ++i) {
    os << (i ? ", " : "") << p.hidden[i];
  }
  os << "]\n"
     << "  checkpoint_every: " << p.checkpoint_every << "\n";
  return os.str();
}

}  // namespace auvrl
