#include "paving/l2.hpp"

#include <algorithm>

namespace paving {

PavingCertificate l2_pave(const PavingProblem& problem, int n, std::uint64_t seed, double delta_l2) {
  const PartitionOfUnity p = haar_balanced_partition(problem.inclusion.n_shape(), n, seed);
  PavingCertificate c = verify_l2(p, problem, delta_l2);
  c.seed = seed;
  c.config = {{"n", n}, {"delta_l2", delta_l2}};
  return c;
}

L2SizeEstimate l2_paving_size(const PavingProblem& problem, std::uint64_t seed, int max_n) {
  L2SizeEstimate est;
  const int cap = std::min(max_n, problem.inclusion.n_shape().total_dim());
  for (int n = 1; n <= cap; ++n) {
    const PavingCertificate c = l2_pave(problem, n, derive_seed(seed, "l2", static_cast<std::uint64_t>(n)));
    est.max_ratio.push_back(c.max_ratio);
    if (c.max_ratio <= problem.epsilon) {
      est.n = n;
      break;
    }
  }
  return est;
}

}  // namespace paving
