#include "auvrl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "auvrl/errors.hpp"

namespace auvrl {

namespace {

constexpr const char* kMagic = "AUVRL-CHECKPOINT";

std::uint32_t ToLittle(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
        (v >> 24);
  }
  return v;
}

}  // namespace

std::string HashText(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void SaveCheckpoint(const std::string& path, const PolicySnapshot& snapshot) {
  const Policy& policy = snapshot.policy;
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["architecture"] = "mlp_actor_critic";
  header["activation"] = "elu";
  header["actor_output"] = "tanh";
  header["obs_dim"] = policy.spec().obs_dim;
  header["act_dim"] = policy.spec().act_dim;
  header["hidden"] = policy.spec().hidden;
  header["config_hash"] = snapshot.config_hash;
  header["dtype"] = "float32";
  header["byte_order"] = "little";
  header["param_count"] = policy.num_params();
  nlohmann::json blocks = nlohmann::json::array();
  for (const ParamBlock& b : policy.blocks()) {
    blocks.push_back({{"name", b.name}, {"shape", {b.rows, b.cols}}});
  }
  header["blocks"] = blocks;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path, "cannot open checkpoint for writing");
  out << kMagic << '\n' << header.dump() << '\n';
  for (int i = 0; i < policy.num_params(); ++i) {
    const std::uint32_t bits =
        ToLittle(std::bit_cast<std::uint32_t>(policy.params()[i]));
    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
  }
  if (!out) throw InputError(path, "failed writing checkpoint");
}

PolicySnapshot LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open checkpoint");
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != kMagic) throw InputError(path, "not an auvrl checkpoint");
  std::getline(in, header_line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path, std::string("malformed header: ") + e.what());
  }

  PolicySnapshot snap;
  try {
    snap.format_version = header.at("format_version").get<int>();
    if (snap.format_version != kCheckpointVersion) {
      throw InputError(path, "unsupported format version " +
                                 std::to_string(snap.format_version));
    }
    if (header.at("architecture") != "mlp_actor_critic" ||
        header.at("activation") != "elu" || header.at("dtype") != "float32" ||
        header.at("byte_order") != "little") {
      throw InputError(path, "unsupported architecture, activation or dtype");
    }
    NetworkSpec spec;
    spec.obs_dim = header.at("obs_dim").get<int>();
    spec.act_dim = header.at("act_dim").get<int>();
    spec.hidden = header.at("hidden").get<std::vector<int>>();
    if (spec.obs_dim != kObsDim || spec.act_dim != kActDim) {
      throw InputError(path, "policy must map 16 observations to 6 actions");
    }
    snap.policy = Policy(spec);
    snap.config_hash = header.value("config_hash", "");
    const auto& blocks = header.at("blocks");
    const auto& expected = snap.policy.blocks();
    if (blocks.size() != expected.size() ||
        header.at("param_count").get<int>() != snap.policy.num_params()) {
      throw InputError(path, "parameter block layout does not match sizes");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto shape = blocks[i].at("shape").get<std::vector<int>>();
      if (blocks[i].at("name") != expected[i].name || shape.size() != 2 ||
          shape[0] != expected[i].rows || shape[1] != expected[i].cols) {
        throw InputError(path, "unexpected parameter block " +
                                   blocks[i].dump());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path, std::string("malformed header: ") + e.what());
  }

  for (int i = 0; i < snap.policy.num_params(); ++i) {
    std::uint32_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof(bits))) {
      throw InputError(path, "truncated parameter data");
    }
    snap.policy.params()[i] = std::bit_cast<float>(ToLittle(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw InputError(path, "trailing bytes after parameter data");
  }
  if (!snap.policy.AllFinite()) {
    throw InputError(path, "checkpoint contains non-finite parameters");
  }
  return snap;
}

}  // namespace auvrl
