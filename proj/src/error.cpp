#include "edgeshare/error.hpp"

namespace edgeshare {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_order: return "invalid-order";
    case ErrorCode::malformed_table: return "malformed-table";
    case ErrorCode::invalid_element: return "invalid-element";
    case ErrorCode::empty_secret: return "empty-secret";
    case ErrorCode::encryption_failure: return "encryption-failure";
    case ErrorCode::authentication_failure: return "authentication-failure";
    case ErrorCode::decrypt_failure: return "decrypt-failure";
    case ErrorCode::tag_mismatch: return "tag-mismatch";
    case ErrorCode::algebra_failure: return "algebra-failure";
    case ErrorCode::checksum_mismatch: return "checksum-mismatch";
    case ErrorCode::clock_error: return "clock-error";
    case ErrorCode::invalid_curve: return "invalid-curve";
    case ErrorCode::singular_curve: return "singular-curve";
    case ErrorCode::group_full: return "group-full";
    case ErrorCode::duplicate_device: return "duplicate-device";
    case ErrorCode::refuse_sync: return "refuse-sync";
    case ErrorCode::wrong_purpose: return "wrong-purpose";
    case ErrorCode::unknown_key: return "unknown-key";
    case ErrorCode::already_split: return "already-split";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::too_few_samples: return "too-few-samples";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::too_few_distinct_values: return "too-few-distinct-values";
    case ErrorCode::zero_variance: return "zero-variance";
    case ErrorCode::parameter_out_of_range: return "parameter-out-of-range";
    case ErrorCode::classification_error: return "classification-error";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace edgeshare
