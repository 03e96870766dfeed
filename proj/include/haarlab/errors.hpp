#pragma once

#include <stdexcept>
#include <string>

namespace haarlab {

enum class ErrorCode {
  level_overflow,
  point_outside_window,
  no_cover_found,
  invalid_grid,
  dimension_mismatch,
  coefficient_bound_violation,
  not_a_shift_remainder_commutator,
  svd_failure,
  empty_set,
  witness_not_found,
  pair_not_found,
  ball_pair_failure,
  unknown_experiment,
  config_invalid,
  io_error,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace haarlab
