#pragma once

// Paving in the trace norm ||x||_2 by Haar-rotated diagonal partitions.

#include <cstdint>
#include <vector>

#include "paving/paving.hpp"

namespace paving {

/// Balanced partition of a Haar-rotated diagonal subalgebra of N into n
/// parts, scored by ||sum_i p_i x p_i - E(x)||_2 / ||x - E(x)||_2.
/// Verified iff every ratio is <= n^{-1/2} + delta_l2.
PavingCertificate l2_pave(const PavingProblem& problem, int n, std::uint64_t seed, double delta_l2 = 0.05);

struct L2SizeEstimate {
  int n = 0;                  // smallest n whose max ratio is <= epsilon; 0 if none up to max_n
  std::vector<double> max_ratio;  // max_ratio[n - 1] for n = 1..last tried
};

/// Smallest n with max ratio <= problem.epsilon; the partition for n is
/// drawn from derive_seed(seed, "l2", n).
L2SizeEstimate l2_paving_size(const PavingProblem& problem, std::uint64_t seed, int max_n);

}  // namespace paving
