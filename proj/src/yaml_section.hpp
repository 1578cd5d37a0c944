#ifndef AUVRL_SRC_YAML_SECTION_HPP_
#define AUVRL_SRC_YAML_SECTION_HPP_

#include <array>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "auvrl/errors.hpp"
#include "auvrl/so3.hpp"

namespace auvrl::internal {

// Map node wrapper that records which keys were read so that leftovers can
// be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string* source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw InputError(Where(node_, path_), "expected a mapping");
    }
  }

  template <typename T>
  void Get(const std::string& key, T* out) {
    const YAML::Node n = Lookup(key);
    if (!n) return;
    try {
      *out = n.as<T>();
    } catch (const YAML::Exception&) {
      throw InputError(Where(n, Key(key)), "wrong type for this key");
    }
  }

  template <typename T>
  void GetList(const std::string& key, std::size_t size, T* out) {
    const YAML::Node n = Lookup(key);
    if (!n) return;
    std::vector<double> v;
    try {
      v = n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      throw InputError(Where(n, Key(key)), "expected a list of numbers");
    }
    if (v.size() != size) {
      throw InputError(Where(n, Key(key)),
                       "expected " + std::to_string(size) + " values");
    }
    for (std::size_t i = 0; i < size; ++i) (*out)[i] = v[i];
  }

  void GetRange(const std::string& key, std::pair<double, double>* out) {
    std::array<double, 2> v{out->first, out->second};
    GetList(key, 2, &v);
    *out = {v[0], v[1]};
  }

  // Either `size` diagonal entries or a size x size nested list.
  template <typename M>
  void GetMatrix(const std::string& key, M* out) {
    const YAML::Node n = Lookup(key);
    if (!n) return;
    const int size = static_cast<int>(out->rows());
    bool ok = true;
    try {
      if (n.IsSequence() && n.size() > 0 && n[0].IsSequence()) {
        const auto rows = n.as<std::vector<std::vector<double>>>();
        ok = static_cast<int>(rows.size()) == size;
        for (int r = 0; ok && r < size; ++r) {
          ok = static_cast<int>(rows[r].size()) == size;
          for (int c = 0; ok && c < size; ++c) (*out)(r, c) = rows[r][c];
        }
      } else {
        const auto diag = n.as<std::vector<double>>();
        ok = static_cast<int>(diag.size()) == size;
        if (ok) {
          out->setZero();
          for (int i = 0; i < size; ++i) (*out)(i, i) = diag[i];
        }
      }
    } catch (const YAML::Exception&) {
      ok = false;
    }
    if (!ok) {
      throw InputError(Where(n, Key(key)),
                       "expected " + std::to_string(size) +
                           " diagonal values or a " + std::to_string(size) +
                           "x" + std::to_string(size) + " nested list");
    }
  }

  // Each entry must be a list of three numbers.
  void GetPoints(const std::string& key, std::vector<Vec3>* out) {
    const YAML::Node n = Lookup(key);
    if (!n) return;
    if (!n.IsSequence()) {
      throw InputError(Where(n, Key(key)), "expected a list of [x, y, z]");
    }
    out->clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      std::vector<double> v;
      try {
        v = n[i].as<std::vector<double>>();
      } catch (const YAML::Exception&) {
        v.clear();
      }
      if (v.size() != 3) {
        throw InputError(Where(n[i], Key(key) + "[" + std::to_string(i) + "]"),
                         "expected [x, y, z]");
      }
      out->emplace_back(v[0], v[1], v[2]);
    }
  }

  bool Has(const std::string& key) const {
    if (!node_ || !node_.IsMap()) return false;
    const YAML::Node n = node_[key];
    return n.IsDefined() && !n.IsNull();
  }

  // Location of the value for `key`, or of this section.
  std::string WhereKey(const std::string& key) const {
    if (Has(key)) return Where(node_[key], Key(key));
    return Where(node_, Key(key));
  }

  Section Child(const std::string& key) {
    return Section(Lookup(key), Key(key), source_);
  }

  // Rejects keys that were never read.
  void Finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!seen_.count(k)) {
        throw InputError(Where(kv.first, Key(k)), "unknown key");
      }
    }
  }

  std::string Where(const YAML::Node& n, const std::string& key) const {
    std::ostringstream os;
    os << *source_;
    const YAML::Mark m = n.Mark();
    if (m.line >= 0) {
      os << ":" << m.line + 1 << ":" << m.column + 1;
    } else {
      os << " (override)";
    }
    if (!key.empty()) os << " " << key;
    return os.str();
  }

  std::string Key(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  YAML::Node Lookup(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    YAML::Node n = node_[key];
    if (!n.IsDefined() || n.IsNull()) return YAML::Node(YAML::NodeType::Undefined);
    return n;
  }

  YAML::Node node_;
  std::string path_;
  const std::string* source_;
  std::set<std::string> seen_;
};

}  // namespace auvrl::internal

#endif  // AUVRL_SRC_YAML_SECTION_HPP_
