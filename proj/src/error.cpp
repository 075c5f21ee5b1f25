#include "homecore/error.hpp"

namespace homecore {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_polygon: return "invalid_polygon";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::unknown_target: return "unknown_target";
    case ErrorCode::no_feasible_edge: return "no_feasible_edge";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::empty_cloud: return "empty_cloud";
    case ErrorCode::degenerate_cloud: return "degenerate_cloud";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::missing_joint: return "missing_joint";
    case ErrorCode::degenerate_scale: return "degenerate_scale";
    case ErrorCode::empty_patch: return "empty_patch";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::zero_spectral_radius: return "zero_spectral_radius";
    case ErrorCode::singular_system: return "singular_system";
    case ErrorCode::missing_class: return "missing_class";
    case ErrorCode::untrained_model: return "untrained_model";
    case ErrorCode::infeasible_config: return "infeasible_config";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::invalid_command: return "invalid_command";
    case ErrorCode::unparsable_command: return "unparsable_command";
    case ErrorCode::step_limit_exceeded: return "step_limit_exceeded";
    case ErrorCode::backend_error: return "backend_error";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::http_error: return "http_error";
    case ErrorCode::schema_violation: return "schema_violation";
    case ErrorCode::precondition_failed: return "precondition_failed";
  }
  return "unknown";
}

int error_exit_code(ErrorCode code) {
  return code == ErrorCode::io_error ? 3 : 1;
}

}  // namespace homecore
