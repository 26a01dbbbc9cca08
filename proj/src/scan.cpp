#include "paving/scan.hpp"

#include <algorithm>

#include "paving/bounds.hpp"

namespace paving {

std::vector<ScanRow> scan(const PavingProblem& base, const ScanConfig& cfg) {
  if (cfg.grid.empty()) throw PreconditionError("scan: the epsilon grid is empty");
  std::vector<ScanRow> rows;
  const int dim_n = base.inclusion.n_shape().total_dim();
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const double eps = cfg.grid[g];
    if (!(eps > 0.0)) throw PreconditionError("scan: epsilon must be positive");
    PavingProblem problem = base;
    problem.epsilon = eps;
    ScanRow row;
    row.epsilon = eps;
    row.seed = derive_seed(cfg.seed, "scan", g);
    row.theorem_r = theorem_bound(problem.index, eps).r;
    row.lower_bound = guarded_ceil(lemma24_lower_bound(cfg.tau, eps));
    if (eps >= 1.0) {
      row.r_found = 1;
      row.r_verified = trivial_certificate(problem).verified;
      rows.push_back(row);
      continue;
    }
    const long cap_l = cfg.r_max > 0 ? cfg.r_max : std::min<long>(row.theorem_r, dim_n);
    const int cap = static_cast<int>(std::max(1L, std::min<long>(cap_l, dim_n)));

    auto attempt = [&](int r) {
      SearchConfig sc;
      sc.r = r;
      sc.steps = cfg.steps;
      sc.restarts = cfg.restarts;
      sc.seed = derive_seed(row.seed, "scan-r", static_cast<std::uint64_t>(r));
      return pave_search(problem, sc).certificate.verified;
    };

    int lo = 0;  // largest r known to fail
    int hi = 0;  // smallest r known to verify
    int r = 1;
    while (true) {
      if (attempt(r)) {
        hi = r;
        break;
      }
      lo = r;
      if (r == cap) break;
      r = std::min(cap, 2 * r);
    }
    if (hi == 0) {
      row.r_found = lo;
      row.r_verified = false;
    } else {
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (attempt(mid))
          hi = mid;
        else
          lo = mid;
      }
      row.r_found = hi;
      row.r_verified = true;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace paving
