#include "qdgate/error.hpp"

namespace qdgate {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::degenerate_dressing: return "DegenerateDressing";
    case ErrorCode::invalid_detuning: return "InvalidDetuning";
    case ErrorCode::negative_radicand: return "NegativeRadicand";
    case ErrorCode::step_limit_exceeded: return "StepLimitExceeded";
    case ErrorCode::tolerance_failure: return "ToleranceFailure";
    case ErrorCode::nonzero_mixing: return "NonzeroMixing";
    case ErrorCode::negative_frequency: return "NegativeFrequency";
    case ErrorCode::nonpositive_frequency: return "NonpositiveFrequency";
    case ErrorCode::divergent_integral: return "DivergentIntegral";
    case ErrorCode::unresolved_spectrum: return "UnresolvedSpectrum";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::step_too_large: return "StepTooLarge";
    case ErrorCode::quadrature_failure: return "QuadratureFailure";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool is_numeric_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::step_limit_exceeded:
    case ErrorCode::tolerance_failure:
    case ErrorCode::divergent_integral:
    case ErrorCode::unresolved_spectrum:
    case ErrorCode::quadrature_failure:
    case ErrorCode::degenerate_dressing:
      return true;
    default:
      return false;
  }
}

}  // namespace qdgate
