#ifndef TONGUE_CONFIG_HPP
#define TONGUE_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace tongue {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class ErrorKind {
  ResidualTooLarge,
  NoConvergence,
  WrongPeriod,
  Overflow,
  DegenerateB,
  InconsistentData,
  DomainEscape,
  OutOfRange,
  AtBasePoint,
  CriticalOnOrbit,
  BisectionFailure,
  PathBroken,
  InsufficientData,
  Precondition,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::WrongPeriod: return "WrongPeriod";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DegenerateB: return "DegenerateB";
    case ErrorKind::InconsistentData: return "InconsistentData";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::AtBasePoint: return "AtBasePoint";
    case ErrorKind::CriticalOnOrbit: return "CriticalOnOrbit";
    case ErrorKind::BisectionFailure: return "BisectionFailure";
    case ErrorKind::PathBroken: return "PathBroken";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::Precondition: return "Precondition";
  }
  return "Unknown";
}

/// Domain failure raised by the numerical routines. The kind is stable and
/// is what callers (and the CLI exit code) dispatch on.
class dynamics_error : public std::runtime_error {
 public:
  dynamics_error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Tolerances and budgets shared by every solver in the library.
struct SolverConfig {
  double root_tol = 1e-9;
  double cycle_tol = 1e-10;
  int max_transient = 20000;
  int max_period = 16;
  int phi_depth = 60;
  double escape_log_threshold = 50.0;
  int koenigs_depth = 200;
  // Iteration budget for complex critical orbits.
  int orbit_budget = 100000;
  // Finite-time Lyapunov exponent above which a cycle-free orbit counts as
  // decisively chaotic rather than undecided.
  double lyapunov_floor = 0.02;
  int section_cells = 4096;
  double path_step = 1.0 / 256.0;

  void validate() const {
    if (!(root_tol > 0) || !(cycle_tol > 0) || !(escape_log_threshold > 0) ||
        !(path_step > 0) || !(lyapunov_floor >= 0)) {
      throw dynamics_error(ErrorKind::Precondition, "tolerances must be positive");
    }
    if (max_transient < 1 || max_period < 1 || phi_depth < 1 || koenigs_depth < 1 ||
        orbit_budget < 1 || section_cells < 1) {
      throw dynamics_error(ErrorKind::Precondition, "integer budgets must be >= 1");
    }
    if (max_period > 62) {
      throw dynamics_error(ErrorKind::Precondition, "max_period must be <= 62");
    }
  }
};

}  // namespace tongue

#endif  // TONGUE_CONFIG_HPP
