#pragma once

// Closed-form bounds on paving and averaging sizes.

namespace paving {

struct TheoremBound {
  long n = 1;  // ceil(16 / eps^2)
  long m = 1;  // ceil(4 index / eps^2)
  long r = 1;  // n m
};

/// Ceiling that ignores round-off just above an integer: ceil(v - 1e-9 v).
long guarded_ceil(double v);

/// Throws PreconditionError unless epsilon > 0 and index >= 1.
TheoremBound theorem_bound(double index, double epsilon);

/// (tau + epsilon)^{-1}. Throws PreconditionError unless tau >= 0, epsilon > 0.
double lemma24_lower_bound(double tau, double epsilon);

/// c = log_{3/2} 2 = ln 2 / (ln 3 - ln 2).
double dixmier_exponent();
/// ceil(epsilon^{-c}). Throws PreconditionError unless 0 < epsilon < 1.
long dixmier_count_bound(double epsilon);

/// 2 sqrt(n - 1) / n. Throws PreconditionError for n < 1.
double kesten_bound(int n);

}  // namespace paving
