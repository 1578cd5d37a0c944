#include "auvrl/replay.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "auvrl/errors.hpp"

namespace auvrl {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

class TraceWriter {
 public:
  TraceWriter(const fs::path& path, const std::string& header)
      : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) throw RuntimeFailure("cannot write " + path_);
    out_ << header << "\n";
  }

  void Row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      std::snprintf(buf_, sizeof(buf_), first ? "%.9g" : ",%.9g", v);
      out_ << buf_;
      first = false;
    }
    out_ << "\n";
  }

  std::string Close() {
    out_.close();
    if (!out_) throw RuntimeFailure("write failed: " + path_);
    return path_;
  }

 private:
  std::string path_;
  std::ofstream out_;
  char buf_[64];
};

}  // namespace

ReplayResult Replay(const std::string& metrics_path, const std::string& out_dir,
                    int stride, const std::optional<std::string>& stored_summary,
                    double transient_s) {
  if (stride < 1) throw InputError("--stride", "stride must be >= 1");
  const std::vector<MetricsRow> rows = ReadMetricsCsv(metrics_path);
  ReplayResult result;
  result.summary = Summarize(rows, transient_s);

  if (stored_summary) {
    std::ifstream in(*stored_summary);
    if (!in) throw InputError(*stored_summary, "cannot open summary file");
    std::stringstream buf;
    buf << in.rdbuf();
    result.distance = SummaryDistance(
        result.summary, SummaryFromJson(buf.str(), *stored_summary));
  }

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + out_dir + ": " + ec.message());

  TraceWriter velocity(dir / "trace_velocity.csv",
                       "t_s,v_d_x,v_d_y,v_d_z,v_x,v_y,v_z");
  TraceWriter attitude(dir / "trace_attitude.csv",
                       "t_s,roll_d_deg,pitch_d_deg,yaw_d_deg,roll_deg,"
                       "pitch_deg,yaw_deg,attitude_error_deg");
  TraceWriter path(dir / "trace_path.csv", "t_s,p_x,p_y,p_z,cross_track_m");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i % stride != 0 && i + 1 != rows.size()) continue;
    const MetricsRow& r = rows[i];
    velocity.Row({r.t, r.v_d.x(), r.v_d.y(), r.v_d.z(), r.v.x(), r.v.y(),
                  r.v.z()});
    const EulerAngles d = QuatToEuler(Normalized(r.q_d));
    const EulerAngles a = QuatToEuler(Normalized(r.q));
    attitude.Row({r.t, d.roll * kDeg, d.pitch * kDeg, d.yaw * kDeg,
                  a.roll * kDeg, a.pitch * kDeg, a.yaw * kDeg,
                  r.attitude_error_deg});
    path.Row({r.t, r.position.x(), r.position.y(), r.position.z(),
              r.cross_track});
  }
  result.files.push_back(velocity.Close());
  result.files.push_back(attitude.Close());
  result.files.push_back(path.Close());

  const std::string summary_path = (dir / "summary.json").string();
  std::ofstream out(summary_path, std::ios::binary);
  out << SummaryToJson(result.summary);
  if (!out) throw RuntimeFailure("cannot write " + summary_path);
  result.files.push_back(summary_path);
  return result;
}

}  // namespace auvrl
