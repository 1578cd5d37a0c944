#include "auvrl/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "auvrl/errors.hpp"

namespace auvrl {

namespace {

constexpr int kNumColumns = 34;

void AppendDouble(std::string* out, double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  out->append(buf, res.ptr);
}

double ParseField(const std::string& field, const std::string& where,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InputError(where, "column '" + column + "': cannot parse '" + field +
                                "' as a number");
  }
  return value;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

const std::vector<std::string>& MetricsColumns() {
  static const std::vector<std::string> columns = {
      "t_s",        "v_d_x",     "v_d_y",     "v_d_z",       "v_x",
      "v_y",        "v_z",       "v_e_x",     "v_e_y",       "v_e_z",
      "q_d_w",      "q_d_x",     "q_d_y",     "q_d_z",       "q_w",
      "q_x",        "q_y",       "q_z",       "attitude_error_deg",
      "omega_x",    "omega_y",   "omega_z",   "action_0",    "action_1",
      "action_2",   "action_3",  "action_4",  "action_5",    "cross_track_m",
      "p_x",        "p_y",       "p_z",       "segment",     "finished"};
  return columns;
}

std::string FormatMetricsCsv(const std::vector<MetricsRow>& rows) {
  const auto& cols = MetricsColumns();
  std::string out;
  for (int c = 0; c < kNumColumns; ++c) {
    if (c) out += ',';
    out += cols[c];
  }
  out += '\n';
  for (const MetricsRow& r : rows) {
    const double values[] = {
        r.t,          r.v_d.x(),    r.v_d.y(),    r.v_d.z(),
        r.v.x(),      r.v.y(),      r.v.z(),      r.v_e.x(),
        r.v_e.y(),    r.v_e.z(),    r.q_d.w,      r.q_d.x,
        r.q_d.y,      r.q_d.z,      r.q.w,        r.q.x,
        r.q.y,        r.q.z,        r.attitude_error_deg,
        r.omega.x(),  r.omega.y(),  r.omega.z(),  r.action[0],
        r.action[1],  r.action[2],  r.action[3],  r.action[4],
        r.action[5],  r.cross_track, r.position.x(), r.position.y(),
        r.position.z()};
    bool first = true;
    for (double v : values) {
      if (!first) out += ',';
      first = false;
      AppendDouble(&out, v);
    }
    out += ',' + std::to_string(r.segment) + ',' + (r.finished ? "1" : "0");
    out += '\n';
  }
  return out;
}

void WriteMetricsCsv(const std::string& path,
                     const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path);
  out << FormatMetricsCsv(rows);
  if (!out) throw RuntimeFailure("write failed: " + path);
}

std::vector<MetricsRow> ParseMetricsCsv(const std::string& text,
                                        const std::string& source) {
  const auto& cols = MetricsColumns();
  const int n = kNumColumns;
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError(source, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitCsv(line);
  if (static_cast<int>(header.size()) != n) {
    throw InputError(source + ":1", "expected " + std::to_string(n) +
                                        " columns in header, got " +
                                        std::to_string(header.size()));
  }
  for (int c = 0; c < n; ++c) {
    if (header[c] != cols[c]) {
      throw InputError(source + ":1", "header column " + std::to_string(c + 1) +
                                          " is '" + header[c] +
                                          "', expected '" + cols[c] + "'");
    }
  }

  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto f = SplitCsv(line);
    if (static_cast<int>(f.size()) != n) {
      throw InputError(where, "row " + std::to_string(rows.size() + 1) +
                                  " has " + std::to_string(f.size()) +
                                  " fields, expected " + std::to_string(n));
    }
    double v[kNumColumns];
    for (int c = 0; c < n; ++c) {
      v[c] = ParseField(f[c], where, cols[c]);
      if (!std::isfinite(v[c])) {
        throw InputError(where, "column '" + cols[c] + "' is not finite");
      }
    }
    MetricsRow r;
    r.t = v[0];
    r.v_d = Vec3(v[1], v[2], v[3]);
    r.v = Vec3(v[4], v[5], v[6]);
    r.v_e = Vec3(v[7], v[8], v[9]);
    r.q_d = Quat{v[10], v[11], v[12], v[13]};
    r.q = Quat{v[14], v[15], v[16], v[17]};
    r.attitude_error_deg = v[18];
    r.omega = Vec3(v[19], v[20], v[21]);
    for (int k = 0; k < 6; ++k) r.action[k] = v[22 + k];
    r.cross_track = v[28];
    r.position = Vec3(v[29], v[30], v[31]);
    r.segment = static_cast<int>(v[32]);
    if (r.segment != v[32] || r.segment < 0) {
      throw InputError(where, "column 'segment' must be a non-negative integer");
    }
    if (v[33] != 0.0 && v[33] != 1.0) {
      throw InputError(where, "column 'finished' must be 0 or 1");
    }
    r.finished = v[33] == 1.0;
    if (!rows.empty()) {
      if (!(r.t > rows.back().t)) {
        throw InputError(where, "time is not strictly increasing");
      }
      if (rows.back().finished) {
        throw InputError(where, "row after the finished row");
      }
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw InputError(source, "trace has no rows");
  return rows;
}

std::vector<MetricsRow> ReadMetricsCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open metrics file");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseMetricsCsv(buf.str(), path);
}

Summary Summarize(const std::vector<MetricsRow>& rows, double transient_s) {
  Summary s;
  if (rows.empty()) return s;
  std::array<double, 3> sq{};
  double att_sum = 0.0, att_sq = 0.0;
  double last_switch = rows.front().t;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MetricsRow& r = rows[i];
    if (i > 0 && r.segment != rows[i - 1].segment) last_switch = r.t;
    s.max_cross_track = std::max(s.max_cross_track, r.cross_track);
    const bool next_switches =
        i + 1 < rows.size() &&
        (rows[i + 1].segment != r.segment || rows[i + 1].finished);
    if (!r.finished && next_switches) {
      s.segment_end_attitude_error_deg.push_back(r.attitude_error_deg);
    }
    if (r.finished || r.t - last_switch < transient_s - 1e-9) continue;
    ++s.samples;
    for (int k = 0; k < 3; ++k) sq[k] += r.v_e[k] * r.v_e[k];
    att_sum += r.attitude_error_deg;
    att_sq += r.attitude_error_deg * r.attitude_error_deg;
    s.attitude_error_max_deg =
        std::max(s.attitude_error_max_deg, r.attitude_error_deg);
  }
  if (s.samples > 0) {
    for (int k = 0; k < 3; ++k) {
      s.rms_velocity_error[k] = std::sqrt(sq[k] / s.samples);
    }
    s.attitude_error_mean_deg = att_sum / s.samples;
    s.attitude_error_rms_deg = std::sqrt(att_sq / s.samples);
  }
  s.duration = rows.back().t;
  s.completed = rows.back().finished;
  s.completion_time = rows.back().t;
  return s;
}

std::string SummaryToJson(const Summary& s) {
  nlohmann::ordered_json j;
  j["rms_velocity_error_m_s"] = s.rms_velocity_error;
  j["attitude_error_mean_deg"] = s.attitude_error_mean_deg;
  j["attitude_error_max_deg"] = s.attitude_error_max_deg;
  j["attitude_error_rms_deg"] = s.attitude_error_rms_deg;
  j["max_cross_track_m"] = s.max_cross_track;
  j["completed"] = s.completed;
  j["completion_time_s"] = s.completion_time;
  j["duration_s"] = s.duration;
  j["samples"] = s.samples;
  j["segment_end_attitude_error_deg"] = s.segment_end_attitude_error_deg;
  return j.dump(2) + "\n";
}

Summary SummaryFromJson(const std::string& text, const std::string& source) {
  Summary s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.rms_velocity_error =
        j.at("rms_velocity_error_m_s").get<std::array<double, 3>>();
    s.attitude_error_mean_deg = j.at("attitude_error_mean_deg").get<double>();
    s.attitude_error_max_deg = j.at("attitude_error_max_deg").get<double>();
    s.attitude_error_rms_deg = j.at("attitude_error_rms_deg").get<double>();
    s.max_cross_track = j.at("max_cross_track_m").get<double>();
    s.completed = j.at("completed").get<bool>();
    s.completion_time = j.at("completion_time_s").get<double>();
    s.duration = j.at("duration_s").get<double>();
    s.samples = j.at("samples").get<int>();
    s.segment_end_attitude_error_deg =
        j.at("segment_end_attitude_error_deg").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source, std::string("invalid summary: ") + e.what());
  }
  return s;
}

double SummaryDistance(const Summary& a, const Summary& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.completed != b.completed || a.samples != b.samples ||
      a.segment_end_attitude_error_deg.size() !=
          b.segment_end_attitude_error_deg.size()) {
    return kInf;
  }
  double d = 0.0;
  auto take = [&d](double x, double y) { d = std::max(d, std::abs(x - y)); };
  for (int k = 0; k < 3; ++k) {
    take(a.rms_velocity_error[k], b.rms_velocity_error[k]);
  }
  take(a.attitude_error_mean_deg, b.attitude_error_mean_deg);
  take(a.attitude_error_max_deg, b.attitude_error_max_deg);
  take(a.attitude_error_rms_deg, b.attitude_error_rms_deg);
  take(a.max_cross_track, b.max_cross_track);
  take(a.completion_time, b.completion_time);
  take(a.duration, b.duration);
  for (std::size_t i = 0; i < a.segment_end_attitude_error_deg.size(); ++i) {
    take(a.segment_end_attitude_error_deg[i],
         b.segment_end_attitude_error_deg[i]);
  }
  return d;
}

}  // namespace auvrl
