#ifndef AUVRL_CHECKPOINT_HPP_
#define AUVRL_CHECKPOINT_HPP_

#include <string>

#include "auvrl/ppo.hpp"

namespace auvrl {

inline constexpr int kCheckpointVersion = 1;

// A trained policy together with the metadata stored next to it.
struct PolicySnapshot {
  Policy policy;
  std::string config_hash;
  int format_version = kCheckpointVersion;
};

// File layout:
//   line 1: "AUVRL-CHECKPOINT"
//   line 2: one-line JSON header (architecture, sizes, activation, format
//           version, config hash, ordered block list, parameter count)
//   rest:   parameters as little-endian float32, blocks in header order.
void SaveCheckpoint(const std::string& path, const PolicySnapshot& snapshot);

// Throws InputError on a malformed file or an architecture the loader does
// not support.
PolicySnapshot LoadCheckpoint(const std::string& path);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string HashText(const std::string& text);

}  // namespace auvrl

#endif  // AUVRL_CHECKPOINT_HPP_
