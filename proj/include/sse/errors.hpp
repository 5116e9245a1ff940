#pragma once

#include <stdexcept>
#include <string>

namespace sse {

/// The implicit coarse solve is not a contraction (theta * dT * L_F >= 1).
class ContractionViolation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Fixed-point iteration hit its iteration cap before reaching the tolerance.
class NonConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration. line() is 0 when the
/// problem is not tied to a specific line (e.g. a missing key).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// A Monte Carlo study produced non-finite values (unstable regime).
class Divergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sse
