#include "paving/bounds.hpp"

#include <cmath>

#include "paving/error.hpp"

namespace paving {

long guarded_ceil(double v) { return static_cast<long>(std::ceil(v - 1e-9 * std::abs(v))); }

TheoremBound theorem_bound(double index, double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("theorem_bound: epsilon must be positive");
  if (!(index >= 1.0)) throw PreconditionError("theorem_bound: index must be >= 1");
  TheoremBound b;
  const double inv = 1.0 / (epsilon * epsilon);
  b.n = guarded_ceil(16.0 * inv);
  b.m = guarded_ceil(4.0 * index * inv);
  b.r = b.n * b.m;
  return b;
}

double lemma24_lower_bound(double tau, double epsilon) {
  if (!(tau >= 0.0)) throw PreconditionError("lemma24_lower_bound: tau must be nonnegative");
  if (!(epsilon > 0.0)) throw PreconditionError("lemma24_lower_bound: epsilon must be positive");
  return 1.0 / (tau + epsilon);
}

double dixmier_exponent() { return std::log(2.0) / (std::log(3.0) - std::log(2.0)); }

long dixmier_count_bound(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("dixmier_count_bound: need 0 < epsilon < 1");
  return guarded_ceil(std::pow(epsilon, -dixmier_exponent()));
}

double kesten_bound(int n) {
  if (n < 1) throw PreconditionError("kesten_bound: n must be >= 1");
  return 2.0 * std::sqrt(static_cast<double>(n - 1)) / n;
}

}  // namespace paving
