#include "auvrl/los.hpp"

#include <cmath>
#include <string>

#include "auvrl/errors.hpp"

namespace auvrl {

namespace {

constexpr double kMinSegment = 1e-9;

}  // namespace

void WaypointPath::Validate() const {
  if (waypoints.size() < 2) {
    throw InvalidArgument("waypoint path needs at least two waypoints");
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!waypoints[i].allFinite()) {
      throw InvalidArgument("waypoint " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && (waypoints[i] - waypoints[i - 1]).norm() < kMinSegment) {
      throw InvalidArgument("waypoints " + std::to_string(i - 1) + " and " +
                            std::to_string(i) + " coincide");
    }
  }
  if (!(acceptance_radius > 0.0)) {
    throw InvalidArgument("acceptance radius must be > 0");
  }
  if (!(lookahead > 0.0)) throw InvalidArgument("lookahead must be > 0");
  if (!(speed >= 0.0)) throw InvalidArgument("speed must be >= 0");
}

LosCommand LosVelocity(const Vec3& p, const Quat& q, const WaypointPath& path,
                       const GuidanceState& state) {
  LosCommand cmd;
  cmd.state = state;
  const int n = path.num_segments();
  if (n < 1) throw InvalidArgument("LosVelocity: path has no segments");
  if (cmd.state.segment < 0 || cmd.state.segment >= n) {
    throw InvalidArgument("LosVelocity: segment index out of range");
  }
  while (!cmd.state.finished) {
    const Vec3& start = path.waypoints[cmd.state.segment];
    const Vec3& end = path.waypoints[cmd.state.segment + 1];
    const bool degenerate = (end - start).norm() < kMinSegment;
    if (degenerate) ++cmd.skipped_segments;
    if (degenerate || (p - end).norm() < path.acceptance_radius) {
      cmd.switched = true;
      if (cmd.state.segment + 1 >= n) {
        cmd.state.finished = true;
      } else {
        ++cmd.state.segment;
      }
      continue;
    }
    break;
  }
  if (cmd.state.finished) return cmd;

  const Vec3& start = path.waypoints[cmd.state.segment];
  const Vec3& end = path.waypoints[cmd.state.segment + 1];
  const Vec3 tangent = (end - start).normalized();
  const double along = (p - start).dot(tangent);
  const Vec3 target = start + (along + path.lookahead) * tangent;
  // |target - p| >= lookahead > 0, so the direction is always defined
  cmd.v_d_world = path.speed * (target - p).normalized();
  cmd.v_d_body = RotateVector(Conjugate(q), cmd.v_d_world);
  return cmd;
}

double CrossTrackError(const Vec3& p, const WaypointPath& path,
                       const GuidanceState& state) {
  if (state.segment < 0 || state.segment >= path.num_segments()) {
    throw InvalidArgument("CrossTrackError: segment index out of range");
  }
  const Vec3& start = path.waypoints[state.segment];
  const Vec3& end = path.waypoints[state.segment + 1];
  const Vec3 d = end - start;
  const double len = d.norm();
  if (len < kMinSegment) return (p - start).norm();
  return (p - start).cross(d).norm() / len;
}

}  // namespace auvrl
