#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgeshare {

/// Machine-readable failure categories. Every exception thrown by the
/// library carries exactly one of these; the CLI maps them onto its error
/// envelope by name.
enum class ErrorCode {
  invalid_order,
  malformed_table,
  invalid_element,
  empty_secret,
  encryption_failure,
  authentication_failure,
  decrypt_failure,
  tag_mismatch,
  algebra_failure,
  checksum_mismatch,
  clock_error,
  invalid_curve,
  singular_curve,
  group_full,
  duplicate_device,
  refuse_sync,
  wrong_purpose,
  unknown_key,
  already_split,
  invalid_state,
  too_few_samples,
  non_finite,
  too_few_distinct_values,
  zero_variance,
  parameter_out_of_range,
  classification_error,
  config_error,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edgeshare
