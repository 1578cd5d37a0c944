#ifndef AUVRL_SCENARIO_HPP_
#define AUVRL_SCENARIO_HPP_

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "auvrl/los.hpp"
#include "auvrl/vehicle.hpp"

namespace auvrl {

enum class AttitudeMode { kCourseAligned, kFixed, kRandomPerWaypoint };

std::string ToString(AttitudeMode mode);

// How the attitude setpoint is chosen while following the path.
struct AttitudeSchedule {
  AttitudeMode mode = AttitudeMode::kCourseAligned;
  Vec3 setpoint = Vec3::Zero();  // roll, pitch, yaw in rad (fixed mode)
  std::uint64_t seed = 0;        // random mode
  std::pair<double, double> roll_range{-std::numbers::pi / 2, std::numbers::pi / 2};
  std::pair<double, double> pitch_range{-std::numbers::pi / 2, std::numbers::pi / 2};
  std::pair<double, double> yaw_range{-std::numbers::pi, std::numbers::pi};

  void Validate() const;
};

// Changes applied on top of the nominal vehicle.
struct Perturbation {
  double mass_delta = 0.0;       // kg, weight follows
  double buoyancy_delta = 0.0;   // N
  Vec3 cm_shift = Vec3::Zero();  // m, body frame
};

struct ScenarioSpec {
  std::string id;
  WaypointPath path;
  AttitudeSchedule attitude;
  Perturbation perturbation;
  double max_duration = 60.0;  // s
  std::optional<Vec3> initial_position;  // defaults to the first waypoint
  Vec3 initial_attitude = Vec3::Zero();  // roll, pitch, yaw in rad

  void Validate() const;
};

ScenarioSpec ParseScenario(const std::string& yaml_text,
                           const std::string& source = "<scenario>");
ScenarioSpec LoadScenario(const std::string& path);

// The dynamics are written about the centre of mass, so moving the CM by s
// is expressed as moving the CB by -s.
VehicleParams ApplyPerturbation(const VehicleParams& base,
                                const Perturbation& perturbation);

// Heading and elevation of a world-frame direction, zero roll. A zero
// vector yields nullopt.
std::optional<Quat> CourseAttitude(const Vec3& direction_world);

// One attitude per path segment drawn from the schedule's seed.
std::vector<Quat> RandomSegmentAttitudes(const AttitudeSchedule& schedule,
                                         int num_segments);

}  // namespace auvrl

#endif  // AUVRL_SCENARIO_HPP_
