#pragma once

#include <stdexcept>
#include <string>

namespace sff {

enum class Errc {
  empty_sequence,
  dimension_mismatch,
  decode_error,
  parse_error,
  out_of_range_frame,
  invalid_roi,
  zero_bins,
  length_mismatch,
  infeasible_bounds,
  too_few_matches,
  degenerate_configuration,
  ill_conditioned,
  zero_target,
  bin_mismatch,
  unreachable,
  branch_failure,
  no_candidates,
  too_short,
  empty_output,
  io_error,
  invalid_config,
  invalid_argument,
};

const char* errc_name(Errc c);

/// Library-wide exception. Carries a machine-checkable code next to the
/// human-readable message so callers (and the CLI) can map failures
/// without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace sff
