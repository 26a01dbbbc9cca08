#include "paving/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace paving {

namespace {

// x lives on ⊕_l (C^{m_l} ⊗ C^k) with row index c * m_l + i.
std::vector<Matrix> amplified_cond_exp(const Inclusion& inc, const std::vector<Matrix>& x, int amp) {
  const AlgebraShape& ms = inc.m_shape();
  std::vector<Matrix> out;
  for (std::size_t l = 0; l < ms.num_blocks(); ++l) out.push_back(Matrix::Zero(x[l].rows(), x[l].cols()));
  for (int c = 0; c < amp; ++c)
    for (int cc = 0; cc < amp; ++cc) {
      std::vector<Matrix> piece;
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        const int d = ms.dim(l);
        piece.push_back(x[l].block(c * d, cc * d, d, d));
      }
      Element e = inc.cond_exp_n(Element(ms, std::move(piece)));
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        const int d = ms.dim(l);
        out[l].block(c * d, cc * d, d, d) = e.block(l);
      }
    }
  return out;
}

}  // namespace

IndexEstimate pp_index_estimate(const Inclusion& inc, int trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("pp_index_estimate needs at least one trial");
  IndexEstimate est;
  est.trials = trials;
  est.exact = inc.exact_index();
  const int amp = inc.spec().max_multiplicity();
  est.amplification = amp;
  const AlgebraShape& ms = inc.m_shape();

  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, "pp-index", static_cast<std::uint64_t>(t));
    Rng rng(s);
    std::vector<Matrix> x;
    bool singular = false;
    for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
      const int d = ms.dim(l) * amp;
      const int rank = rng.uniform() < 0.5 ? 1 : rng.uniform_int(1, d);
      Matrix g = rng.ginibre(d, rank);
      Matrix xl = g * g.adjoint();
      xl /= std::max(1e-300, xl.trace().real());
      if (rank < d) singular = true;
      x.push_back(std::move(xl));
    }
    if (singular) ++est.regularized;
    std::vector<Matrix> ex = amplified_cond_exp(inc, x, amp);
    double mu = 0.0;
    for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
      // Largest mu with x <= mu E(x), computed on the support of E(x), which
      // contains the support of x.
      Eigen::SelfAdjointEigenSolver<Matrix> eb(0.5 * (ex[l] + ex[l].adjoint()));
      if (eb.info() != Eigen::Success) throw NumericError("eigensolver failed in pp_index_estimate");
      const double top = eb.eigenvalues().maxCoeff();
      std::vector<Eigen::Index> keep;
      for (Eigen::Index e = 0; e < eb.eigenvalues().size(); ++e)
        if (eb.eigenvalues()(e) > 1e-12 * top) keep.push_back(e);
      if (keep.empty()) continue;
      Matrix w(eb.eigenvectors().rows(), static_cast<Eigen::Index>(keep.size()));
      for (std::size_t c = 0; c < keep.size(); ++c)
        w.col(static_cast<Eigen::Index>(c)) = eb.eigenvectors().col(keep[c]) / std::sqrt(eb.eigenvalues()(keep[c]));
      Matrix h = w.adjoint() * x[l] * w;
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
      mu = std::max(mu, es.eigenvalues().maxCoeff());
    }
    if (mu > 0.0 && 1.0 / mu < best) {
      best = 1.0 / mu;
      est.min_seed = s;
    }
  }
  est.lambda = best;
  est.index = 1.0 / best;
  return est;
}

double pp_inequality_check(const Inclusion& inc, double index, const Element& x) {
  Element d = inc.cond_exp_n(x) * complex(index) - x;
  return min_eigenvalue(d.hermitian_part());
}

SupportBound lemma14_support_bound(const Inclusion& inc, const Element& q, double index) {
  Projection p = Projection::from_element(q);
  Element en = inc.cond_exp_n_coords(p.element());
  SupportBound b;
  b.lhs = support_projection(en.hermitian_part()).trace();
  b.rhs = index * p.trace();
  return b;
}

double resolve_index(const Inclusion& inc, std::optional<double> override_index, int trials, std::uint64_t seed) {
  if (override_index) {
    if (!(*override_index >= 1.0)) throw PreconditionError("index override must be >= 1");
    return *override_index;
  }
  if (auto e = inc.exact_index()) return *e;
  return pp_index_estimate(inc, trials, seed).index;
}

}  // namespace paving
