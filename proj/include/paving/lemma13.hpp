#pragma once

// Small-support paving by a cyclic permutation of equal-trace projections.

#include <cstdint>
#include <vector>

#include "paving/algebra.hpp"

namespace paving {

/// Partition of ⊕_k C^{dims[k]} into m parts q_1..q_m (frames[j][k] is part
/// j's frame in block k) such that sum_j q_j x q_j = (1/m) sum_k v^k x v^{-k}
/// for every x supported under the given support frames.
///
/// In each block, e_1 contains the support and has floor(D/m) columns;
/// e_2..e_m are further orthonormal pieces of the same size from a Haar
/// rotation of the complement; v maps e_j onto e_{j+1} cyclically and the q_j
/// are its spectral projections. Leftover dimensions go round-robin to the
/// parts. Throws InfeasibleError when a support has more than floor(D/m)
/// columns.
std::vector<std::vector<Matrix>> cyclic_refinement(const std::vector<int>& dims, const std::vector<Matrix>& support,
                                                   int m, Rng& rng);

struct Lemma13Result {
  PartitionOfUnity partition;
  int m = 1;
  std::vector<double> values;  // ||sum_j q_j x q_j|| per x
  std::vector<double> bounds;  // ||x|| / m per x
  double support_trace = 0.0;  // tau(e), e the join of left and right supports
};

/// m = ceil(max ||x|| / epsilon). Throws InfeasibleError when
/// 2 sum_x tau(s(|x|)) < epsilon / max ||x|| fails, or when the support does not
/// fit under an equal-trace piece (the message names the largest feasible m).
Lemma13Result lemma13_construct(const AlgebraShape& shape, const std::vector<Element>& F, double epsilon,
                                std::uint64_t seed);

}  // namespace paving
