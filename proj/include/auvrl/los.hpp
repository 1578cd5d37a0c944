#ifndef AUVRL_LOS_HPP_
#define AUVRL_LOS_HPP_

#include <vector>

#include "auvrl/so3.hpp"

namespace auvrl {

// Polyline in NED coordinates followed with lookahead line-of-sight
// guidance.
struct WaypointPath {
  std::vector<Vec3> waypoints;
  double acceptance_radius = 0.3;  // m
  double speed = 0.5;              // m/s
  double lookahead = 1.0;          // m

  int num_segments() const { return static_cast<int>(waypoints.size()) - 1; }
  // >= 2 waypoints, distinct neighbours, positive radius/lookahead/speed.
  void Validate() const;
};

struct GuidanceState {
  int segment = 0;
  bool finished = false;
};

struct LosCommand {
  Vec3 v_d_body = Vec3::Zero();
  Vec3 v_d_world = Vec3::Zero();
  GuidanceState state;
  bool switched = false;      // segment changed during this call
  int skipped_segments = 0;   // zero-length segments passed over
};

// Velocity reference of norm `speed` pointing from p towards the point
// `lookahead` metres ahead of p's projection on the active segment. The
// segment advances when p enters the acceptance ball of its end point; after
// the last one the command is zero and the state is finished.
LosCommand LosVelocity(const Vec3& p, const Quat& q, const WaypointPath& path,
                       const GuidanceState& state);

// Distance from p to the infinite line through the active segment.
double CrossTrackError(const Vec3& p, const WaypointPath& path,
                       const GuidanceState& state);

}  // namespace auvrl

#endif  // AUVRL_LOS_HPP_
