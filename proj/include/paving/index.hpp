#pragma once

// Pimsner-Popa index estimation and the inequalities built on it.

#include <cstdint>
#include <optional>

#include "paving/inclusion.hpp"

namespace paving {

struct IndexEstimate {
  double lambda = 1.0;  // min over samples of the best c with E(x) >= c x
  double index = 1.0;   // 1 / lambda
  int trials = 0;
  std::uint64_t min_seed = 0;  // seed of the sample attaining the minimum
  int regularized = 0;         // singular samples, handled on the support of E(x)
  int amplification = 1;       // k of the M ⊗ M_k amplification
  std::optional<double> exact;  // closed-form index when known
};

/// Monte-Carlo lower estimate of [M:N].
///
/// Samples x >= 0 in M ⊗ M_k, k = max lambda[k][l], and takes the smallest c
/// with (E_N ⊗ id)(x) >= c x, i.e. 1 / largest generalized eigenvalue of
/// x v = mu (E_N ⊗ id)(x) v. Without the amplification C ⊂ M_n would report
/// n instead of n^2. Samples are random low-rank PSD matrices, rank one half
/// the time; every sample is shifted by 1e-10 so the pencil is definite.
IndexEstimate pp_index_estimate(const Inclusion& inc, int trials, std::uint64_t seed);

/// lambda_min(index E_N(x) - x).
double pp_inequality_check(const Inclusion& inc, double index, const Element& x);

struct SupportBound {
  double lhs = 0.0;  // tau(s(E_N(q)))
  double rhs = 0.0;  // index tau(q)
};

/// Throws PreconditionError when q is not a projection.
SupportBound lemma14_support_bound(const Inclusion& inc, const Element& q, double index);

/// Exact index when known, otherwise the estimate from `trials` samples.
double resolve_index(const Inclusion& inc, std::optional<double> override_index, int trials, std::uint64_t seed);

}  // namespace paving
