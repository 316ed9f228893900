#pragma once

#include <cstddef>
#include <cstdint>

#include "equilib/errors.hpp"

namespace equilib {

// Truncation levels for extend_right: level n places n free particles in
// front of the arithmetic continuation, and levels double until the first
// compare_count + 1 positions agree. The last `guard` particles of a level
// are left out of its residual check.
struct TruncationSchedule {
  std::size_t initial_level = 32;
  std::size_t max_level = 256;
  std::size_t compare_count = 16;
  std::size_t guard = 4;
  double agreement_tol = 1e-8;
};

struct SolverOptions {
  double residual_tol = 1e-10;
  double position_tol = 1e-12;
  std::size_t max_sweeps = 200;
  std::size_t max_outer_iters = 200;
  std::uint64_t rng_seed = 0;
  TruncationSchedule schedule;
  // When set, solvers return unconverged results instead of throwing
  // NoConvergence.
  bool allow_unconverged = false;

  void validate() const {
    if (!(residual_tol > 0) || !(position_tol > 0)) {
      throw InvalidInput("options: tolerances must be positive");
    }
    if (max_sweeps == 0 || max_outer_iters == 0) {
      throw InvalidInput("options: iteration limits must be positive");
    }
    if (schedule.initial_level == 0 || schedule.max_level < schedule.initial_level ||
        schedule.compare_count == 0 || !(schedule.agreement_tol > 0)) {
      throw InvalidInput("options: invalid truncation schedule");
    }
  }
};

}  // namespace equilib
