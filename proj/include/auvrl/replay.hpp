#ifndef AUVRL_REPLAY_HPP_
#define AUVRL_REPLAY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "auvrl/metrics.hpp"

namespace auvrl {

struct ReplayResult {
  Summary summary;                  // recomputed from the trace
  std::vector<std::string> files;   // everything written
  std::optional<double> distance;   // vs the stored summary, if given
};

// Reads a metrics CSV, writes every `stride`-th row (and the last one) as
// velocity, attitude (Euler angles in degrees) and path traces, and the
// recomputed summary. If `stored_summary` names a file, the recomputed
// summary is compared against it.
ReplayResult Replay(const std::string& metrics_path, const std::string& out_dir,
                    int stride = 5,
                    const std::optional<std::string>& stored_summary = {},
                    double transient_s = 3.0);

}  // namespace auvrl

#endif  // AUVRL_REPLAY_HPP_
