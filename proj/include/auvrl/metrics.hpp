#ifndef AUVRL_METRICS_HPP_
#define AUVRL_METRICS_HPP_

#include <array>
#include <string>
#include <vector>

#include "auvrl/so3.hpp"
#include "auvrl/vehicle.hpp"

namespace auvrl {

// One control step of an evaluation rollout. The final row of a completed
// run is written when the last waypoint is reached and has finished = true.
struct MetricsRow {
  double t = 0.0;
  Vec3 v_d = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 v_e = Vec3::Zero();
  Quat q_d;
  Quat q;
  double attitude_error_deg = 0.0;
  Vec3 omega = Vec3::Zero();
  Vec6 action = Vec6::Zero();
  double cross_track = 0.0;
  Vec3 position = Vec3::Zero();
  int segment = 0;
  bool finished = false;
};

const std::vector<std::string>& MetricsColumns();

// Doubles are written with 17 significant digits so that reading the file
// back reproduces them exactly.
void WriteMetricsCsv(const std::string& path,
                     const std::vector<MetricsRow>& rows);
std::string FormatMetricsCsv(const std::vector<MetricsRow>& rows);

// Throws InputError naming the offending line on a header mismatch, a short
// or long row, a non-numeric field or non-monotone time.
std::vector<MetricsRow> ParseMetricsCsv(const std::string& text,
                                        const std::string& source);
std::vector<MetricsRow> ReadMetricsCsv(const std::string& path);

struct Summary {
  std::array<double, 3> rms_velocity_error{};  // m/s, body axes
  double attitude_error_mean_deg = 0.0;
  double attitude_error_max_deg = 0.0;
  double attitude_error_rms_deg = 0.0;
  double max_cross_track = 0.0;  // m, whole run
  bool completed = false;
  double completion_time = 0.0;  // s, or duration if not completed
  double duration = 0.0;         // s
  int samples = 0;               // rows inside the scoring window
  // Error at the last step of each segment before the switch.
  std::vector<double> segment_end_attitude_error_deg;
};

// Rows closer than `transient_s` after t = 0 or after a segment switch are
// excluded from the RMS / mean / max attitude and velocity statistics.
Summary Summarize(const std::vector<MetricsRow>& rows,
                  double transient_s = 3.0);

std::string SummaryToJson(const Summary& summary);
Summary SummaryFromJson(const std::string& text, const std::string& source);

// Largest absolute difference over all numeric fields; infinity if the
// shapes differ.
double SummaryDistance(const Summary& a, const Summary& b);

}  // namespace auvrl

#endif  // AUVRL_METRICS_HPP_
