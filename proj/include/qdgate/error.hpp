#pragma once

#include <stdexcept>
#include <string>

namespace qdgate {

enum class ErrorCode {
  invalid_argument,
  degenerate_dressing,
  invalid_detuning,
  negative_radicand,
  step_limit_exceeded,
  tolerance_failure,
  nonzero_mixing,
  negative_frequency,
  nonpositive_frequency,
  divergent_integral,
  unresolved_spectrum,
  dimension_mismatch,
  step_too_large,
  quadrature_failure,
  config_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// True for failures of the numerics rather than of the inputs.
bool is_numeric_failure(ErrorCode code);

}  // namespace qdgate
