#ifndef AUVRL_ERRORS_HPP_
#define AUVRL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace auvrl {

// Bad shapes, non-finite inputs, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Vehicle parameter set that breaks a physical invariant (non-PD mass
// matrix, negative damping, ...).
class InvalidParameters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config, scenario, checkpoint or metrics input that fails validation.
// `where` is a human readable location ("config.yaml:12:3 ppo.lr").
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Failure during a run (non-finite loss, diverged update).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace auvrl

#endif  // AUVRL_ERRORS_HPP_
