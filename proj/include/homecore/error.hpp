#pragma once

#include <stdexcept>
#include <string>

namespace homecore {

/// Error categories used across all modules. Each maps to a stable CLI slug
/// (see to_string) and, via error_exit_code, to a process exit status.
enum class ErrorCode {
  // geometry / semantic map
  invalid_polygon,
  validation_error,
  parse_error,
  unknown_target,
  no_feasible_edge,
  // perception
  dimension_mismatch,
  empty_cloud,
  degenerate_cloud,
  empty_input,
  // reservoir
  missing_joint,
  degenerate_scale,
  empty_patch,
  invalid_config,
  zero_spectral_radius,
  singular_system,
  missing_class,
  untrained_model,
  // scene generation
  infeasible_config,
  io_error,
  // planner
  invalid_command,
  unparsable_command,
  step_limit_exceeded,
  backend_error,
  timeout,
  http_error,
  schema_violation,
  precondition_failed,
};

const char* to_string(ErrorCode code);

/// Exit statuses: 0 success, 1 domain error, 2 usage error, 3 I/O error.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace homecore
