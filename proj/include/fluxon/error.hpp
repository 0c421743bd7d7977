#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fluxon {

enum class ErrorKind {
  invalid_params,
  invalid_grid,
  grid_too_narrow,
  no_convergence,
  not_converging,
  no_double_well,
  not_a_well,
  level_above_barrier,
  asymmetric_wells,
  invalid_beta,
  ambiguous_classification,
  missing_states,
  outside_linear_window,
  no_commensurate_delay,
  config,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_params: return "invalid parameters";
    case ErrorKind::invalid_grid: return "invalid grid";
    case ErrorKind::grid_too_narrow: return "grid too narrow";
    case ErrorKind::no_convergence: return "no convergence";
    case ErrorKind::not_converging: return "not converging";
    case ErrorKind::no_double_well: return "no double well";
    case ErrorKind::not_a_well: return "not a well";
    case ErrorKind::level_above_barrier: return "level above barrier";
    case ErrorKind::asymmetric_wells: return "asymmetric wells";
    case ErrorKind::invalid_beta: return "invalid beta";
    case ErrorKind::ambiguous_classification: return "ambiguous classification";
    case ErrorKind::missing_states: return "missing states";
    case ErrorKind::outside_linear_window: return "outside linear window";
    case ErrorKind::no_commensurate_delay: return "no commensurate delay";
    case ErrorKind::config: return "config error";
    case ErrorKind::io: return "I/O error";
  }
  return "unknown error";
}

/// Every failure raised by the library carries a machine-readable kind so
/// that sweeps can record per-row markers instead of aborting.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fluxon
