#include "haarlab/errors.hpp"

namespace haarlab {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::level_overflow: return "level-overflow";
    case ErrorCode::point_outside_window: return "point-outside-window";
    case ErrorCode::no_cover_found: return "no-cover-found";
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::coefficient_bound_violation: return "coefficient-bound-violation";
    case ErrorCode::not_a_shift_remainder_commutator: return "not-a-shift-remainder-commutator";
    case ErrorCode::svd_failure: return "svd-failure";
    case ErrorCode::empty_set: return "empty-set";
    case ErrorCode::witness_not_found: return "witness-not-found";
    case ErrorCode::pair_not_found: return "pair-not-found";
    case ErrorCode::ball_pair_failure: return "ball-pair-failure";
    case ErrorCode::unknown_experiment: return "unknown-experiment";
    case ErrorCode::config_invalid: return "config-invalid";
    case ErrorCode::io_error: return "io-error";
  }
  return "error";
}

}  // namespace haarlab
