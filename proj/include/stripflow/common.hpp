#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stripflow {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Process exit codes used by the CLI and by monitored runs.
enum ExitCode : int {
  exit_ok = 0,
  exit_generic = 1,
  exit_config = 2,
  exit_blowup = 3,
  exit_constraint_drift = 4,
  exit_monitor_failure = 5,
  exit_stability_rejection = 6,
  exit_pressure_compat = 7,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Symbol sum failed to converge within the allowed number of terms.
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlowUpError : std::runtime_error {
  double last_valid_time;
  explicit BlowUpError(const std::string& msg, double t)
      : std::runtime_error(msg), last_valid_time(t) {}
};

struct ConstraintDriftError : std::runtime_error {
  int k1 = 0, k2 = 0;  // offending mode (signed integer indices)
  double residual = 0.0;
  ConstraintDriftError(const std::string& msg, int k1_, int k2_, double r)
      : std::runtime_error(msg), k1(k1_), k2(k2_), residual(r) {}
};

struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PressureCompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest text form that round-trips a double exactly.
inline std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace stripflow
