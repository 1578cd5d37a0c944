#include "auvrl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "auvrl/errors.hpp"
#include "auvrl/random.hpp"
#include "yaml_section.hpp"

namespace auvrl {

std::string ToString(AttitudeMode mode) {
  switch (mode) {
    case AttitudeMode::kCourseAligned:
      return "course-aligned";
    case AttitudeMode::kFixed:
      return "fixed";
    case AttitudeMode::kRandomPerWaypoint:
      return "random-per-waypoint";
  }
  return "unknown";
}

void AttitudeSchedule::Validate() const {
  for (const auto& r : {roll_range, pitch_range, yaw_range}) {
    if (!std::isfinite(r.first) || !std::isfinite(r.second) ||
        r.first > r.second) {
      throw InvalidArgument("attitude range must satisfy lo <= hi");
    }
  }
  if (roll_range.first < -std::numbers::pi / 2 ||
      roll_range.second > std::numbers::pi / 2 ||
      pitch_range.first < -std::numbers::pi / 2 ||
      pitch_range.second > std::numbers::pi / 2) {
    throw InvalidArgument("roll and pitch ranges must lie within [-pi/2, pi/2]");
  }
  if (yaw_range.first < -std::numbers::pi || yaw_range.second > std::numbers::pi) {
    throw InvalidArgument("yaw range must lie within [-pi, pi]");
  }
  if (!setpoint.allFinite()) {
    throw InvalidArgument("attitude setpoint must be finite");
  }
}

void ScenarioSpec::Validate() const {
  path.Validate();
  attitude.Validate();
  if (!(max_duration > 0.0) || !std::isfinite(max_duration)) {
    throw InvalidArgument("max duration must be > 0");
  }
  if (initial_position && !initial_position->allFinite()) {
    throw InvalidArgument("initial position must be finite");
  }
  if (!initial_attitude.allFinite()) {
    throw InvalidArgument("initial attitude must be finite");
  }
  if (!std::isfinite(perturbation.mass_delta) ||
      !std::isfinite(perturbation.buoyancy_delta) ||
      !perturbation.cm_shift.allFinite()) {
    throw InvalidArgument("perturbation must be finite");
  }
}

ScenarioSpec ParseScenario(const std::string& yaml_text,
                           const std::string& source) {
  using internal::Section;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw InputError(source + ":" + std::to_string(e.mark.line + 1) + ":" +
                         std::to_string(e.mark.column + 1),
                     "YAML syntax error: " + e.msg);
  }
  if (!root || !root.IsMap()) {
    throw InputError(source, "scenario must be a mapping");
  }

  ScenarioSpec spec;
  Section top(root, "", &source);
  if (!top.Has("id")) throw InputError(source, "missing key 'id'");
  top.Get("id", &spec.id);
  top.Get("max_duration_s", &spec.max_duration);

  if (!top.Has("path")) throw InputError(source, "missing section 'path'");
  Section path = top.Child("path");
  if (!path.Has("waypoints_m")) {
    throw InputError(path.WhereKey("waypoints_m"), "missing key");
  }
  path.GetPoints("waypoints_m", &spec.path.waypoints);
  path.Get("acceptance_radius_m", &spec.path.acceptance_radius);
  path.Get("speed_m_s", &spec.path.speed);
  path.Get("lookahead_m", &spec.path.lookahead);
  path.Finish();

  Section att = top.Child("attitude");
  std::string mode = ToString(spec.attitude.mode);
  att.Get("mode", &mode);
  if (mode == "course-aligned") {
    spec.attitude.mode = AttitudeMode::kCourseAligned;
  } else if (mode == "fixed") {
    spec.attitude.mode = AttitudeMode::kFixed;
  } else if (mode == "random-per-waypoint") {
    spec.attitude.mode = AttitudeMode::kRandomPerWaypoint;
  } else {
    throw InputError(att.WhereKey("mode"),
                     "mode must be course-aligned, fixed or "
                     "random-per-waypoint, got '" + mode + "'");
  }
  att.GetList("setpoint_rad", 3, &spec.attitude.setpoint);
  att.Get("seed", &spec.attitude.seed);
  att.GetRange("roll_range_rad", &spec.attitude.roll_range);
  att.GetRange("pitch_range_rad", &spec.attitude.pitch_range);
  att.GetRange("yaw_range_rad", &spec.attitude.yaw_range);
  att.Finish();

  Section pert = top.Child("perturbation");
  pert.Get("mass_delta_kg", &spec.perturbation.mass_delta);
  pert.Get("buoyancy_delta_n", &spec.perturbation.buoyancy_delta);
  pert.GetList("cm_shift_m", 3, &spec.perturbation.cm_shift);
  pert.Finish();

  Section init = top.Child("initial");
  if (init.Has("position_m")) {
    Vec3 p = Vec3::Zero();
    init.GetList("position_m", 3, &p);
    spec.initial_position = p;
  }
  init.GetList("attitude_rad", 3, &spec.initial_attitude);
  init.Finish();
  top.Finish();

  try {
    spec.Validate();
  } catch (const InvalidArgument& e) {
    throw InputError(source, e.what());
  }
  return spec;
}

ScenarioSpec LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenario(buf.str(), path);
}

VehicleParams ApplyPerturbation(const VehicleParams& base,
                                const Perturbation& perturbation) {
  VehicleParams p = base;
  p.mass += perturbation.mass_delta;
  p.weight += perturbation.mass_delta * kGravity;
  p.buoyancy += perturbation.buoyancy_delta;
  p.r_cb -= perturbation.cm_shift;
  p.Validate();
  return p;
}

std::optional<Quat> CourseAttitude(const Vec3& direction_world) {
  const double horizontal = std::hypot(direction_world.x(), direction_world.y());
  if (horizontal == 0.0 && direction_world.z() == 0.0) return std::nullopt;
  const double yaw = horizontal > 0.0
                         ? std::atan2(direction_world.y(), direction_world.x())
                         : 0.0;
  // NED: z is down, so climbing (negative z) is positive pitch
  const double pitch = std::atan2(-direction_world.z(), horizontal);
  return EulerToQuat(0.0, pitch, yaw);
}

std::vector<Quat> RandomSegmentAttitudes(const AttitudeSchedule& schedule,
                                         int num_segments) {
  Rng rng = MakeStream(schedule.seed, 0);
  std::vector<Quat> out;
  out.reserve(num_segments);
  for (int k = 0; k < num_segments; ++k) {
    const double roll =
        Uniform(rng, schedule.roll_range.first, schedule.roll_range.second);
    const double pitch =
        Uniform(rng, schedule.pitch_range.first, schedule.pitch_range.second);
    const double yaw =
        Uniform(rng, schedule.yaw_range.first, schedule.yaw_range.second);
    out.push_back(EulerToQuat(roll, pitch, yaw));
  }
  return out;
}

}  // namespace auvrl
