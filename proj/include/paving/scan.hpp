#pragma once

// Empirical paving size against its closed-form bracket over a grid of epsilons.

#include <cstdint>
#include <vector>

#include "paving/search.hpp"

namespace paving {

struct ScanConfig {
  std::vector<double> grid;
  long steps = 4000;      // annealing proposals per restart, per tried r
  int restarts = 2;
  int r_max = 0;          // 0: min(theorem r, minimal projections of N)
  double tau = 0.0;       // tau in the lower bound (tau + eps)^{-1}
  std::uint64_t seed = 0;
};

struct ScanRow {
  double epsilon = 0.0;
  int r_found = 0;        // smallest r tried that verified, else the largest r tried
  bool r_verified = false;
  long theorem_r = 0;
  long lower_bound = 0;   // ceil((tau + eps)^{-1})
  std::uint64_t seed = 0;
};

/// For each epsilon: r = 1 when epsilon >= 1; otherwise doubles r until
/// pave_search verifies, then bisects down to the smallest verified r.
/// Throws PreconditionError for an empty grid.
std::vector<ScanRow> scan(const PavingProblem& problem, const ScanConfig& cfg);

}  // namespace paving
