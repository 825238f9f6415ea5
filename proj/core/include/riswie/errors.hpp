#pragma once

#include <stdexcept>
#include <string>

namespace riswie {

// Machine-checkable failure codes. The CLI maps these onto process exit
// codes; library users can switch on code() instead of parsing messages.
enum class ErrorCode {
  parse,
  non_symmetric,
  bad_k,
  dimension_mismatch,
  length_mismatch,
  axis_count_mismatch,
  non_finite,
  k_too_large,
  disconnected,
  not_divisible,
  label_cardinality_mismatch,
  id_mismatch,
  not_full_basis,
  rank_deficient,
  non_positive_lambda,
  bad_spec,
  no_convergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// 2 = unreadable or malformed input data, 3 = configuration/shape error,
// 4 = numerical non-convergence.
inline int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse:
      return 2;
    case ErrorCode::no_convergence:
      return 4;
    default:
      return 3;
  }
}

inline const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::non_symmetric: return "non_symmetric";
    case ErrorCode::bad_k: return "bad_k";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::axis_count_mismatch: return "axis_count_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::k_too_large: return "k_too_large";
    case ErrorCode::disconnected: return "disconnected";
    case ErrorCode::not_divisible: return "not_divisible";
    case ErrorCode::label_cardinality_mismatch: return "label_cardinality_mismatch";
    case ErrorCode::id_mismatch: return "id_mismatch";
    case ErrorCode::not_full_basis: return "not_full_basis";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::non_positive_lambda: return "non_positive_lambda";
    case ErrorCode::bad_spec: return "bad_spec";
    case ErrorCode::no_convergence: return "no_convergence";
  }
  return "unknown";
}

}  // namespace riswie
