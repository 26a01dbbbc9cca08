#include "paving/basis.hpp"

#include <cmath>
#include <sstream>

#include "paving/index.hpp"

namespace paving {

namespace {

// a^{+1/2}, the pseudo-inverse square root, and the support of a, for PSD a in N.
std::pair<Element, Element> pinv_sqrt_and_support(const Element& a, double cut) {
  HermEig eig = herm_eig(a.hermitian_part());
  std::vector<Matrix> root, supp;
  for (std::size_t k = 0; k < a.num_blocks(); ++k) {
    const RealVector& lam = eig.values[k];
    RealVector f(lam.size()), g(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const bool keep = lam(i) > cut;
      f(i) = keep ? 1.0 / std::sqrt(lam(i)) : 0.0;
      g(i) = keep ? 1.0 : 0.0;
    }
    const Matrix& v = eig.vectors[k];
    root.push_back(v * f.cast<complex>().asDiagonal() * v.adjoint());
    supp.push_back(v * g.cast<complex>().asDiagonal() * v.adjoint());
  }
  return {Element(a.shape(), std::move(root)), Element(a.shape(), std::move(supp))};
}

void project_out(const Inclusion& inc, const std::vector<Element>& basis, Element& y) {
  for (const auto& m : basis) y -= m * inc.cond_exp_n(m.adjoint() * y);
}

}  // namespace

OrthonormalBasis orthonormal_basis(const Inclusion& inc) {
  const AlgebraShape& ms = inc.m_shape();
  std::vector<Element> candidates;
  candidates.push_back(Element::identity(ms));
  for (auto& c : inc.commutant_basis()) candidates.push_back(std::move(c));
  for (std::size_t l = 0; l < ms.num_blocks(); ++l)
    for (int j = 0; j < ms.dim(l); ++j)
      for (int i = 0; i < ms.dim(l); ++i) candidates.push_back(inc.m_matrix_unit(l, i, j));

  OrthonormalBasis out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    Element y = candidates[c];
    y *= complex(1.0 / l2_norm(y));
    project_out(inc, out.elements, y);
    project_out(inc, out.elements, y);
    Element a = inc.cond_exp_n_coords(y.adjoint() * y);
    const double na = op_norm(a);
    if (na < 1e-8) {
      ++out.dropped;
      std::ostringstream os;
      os << "candidate " << c << " dropped: ||E_N(y*y)|| = " << na;
      out.log.push_back(os.str());
      continue;
    }
    auto [root, supp] = pinv_sqrt_and_support(a, 1e-8);
    out.elements.push_back(y * inc.embed(root));
    out.gram.push_back(std::move(supp));
  }
  return out;
}

double expansion_residual(const Inclusion& inc, const OrthonormalBasis& basis, const Element& x) {
  Element r = x;
  for (const auto& m : basis.elements) r -= m * inc.cond_exp_n(m.adjoint() * x);
  double worst = 0.0;
  for (const auto& b : r.blocks()) worst = std::max(worst, b.norm());
  return worst;
}

double orthonormality_residual(const Inclusion& inc, const OrthonormalBasis& basis) {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.elements.size(); ++i)
    for (std::size_t j = 0; j < basis.elements.size(); ++j) {
      Element g = inc.cond_exp_n_coords(basis.elements[i].adjoint() * basis.elements[j]);
      if (i == j) g -= basis.gram[j];
      for (const auto& b : g.blocks()) worst = std::max(worst, b.norm());
    }
  return worst;
}

DobReport d_ob(const Inclusion& inc, const OrthonormalBasis& basis, double index, bool index_exact) {
  DobReport r;
  r.index = index;
  r.index_exact = index_exact;
  r.lower = index;
  r.upper = 1.0 + index * (std::ceil(index - 1e-9 * index) - 1.0);
  r.basis_size = basis.elements.size();
  const AlgebraShape& ms = inc.m_shape();
  Element s = Element::zero(ms);
  Element t = Element::zero(ms);
  for (const auto& m : basis.elements) {
    s += m.adjoint() * m;
    t += m * m.adjoint();
  }
  r.value = op_norm(s.hermitian_part());
  r.lambda_sum_residual = op_norm(t * complex(1.0 / index) - Element::identity(ms));
  int partial = 0;
  const Element one = Element::identity(inc.n_shape());
  for (const auto& g : basis.gram)
    if (op_norm(g - one) > 1e-8) ++partial;
  r.all_but_one_full = partial <= 1;
  return r;
}

DobReport d_ob(const Inclusion& inc) {
  const auto exact = inc.exact_index();
  const double index = exact ? *exact : pp_index_estimate(inc, 2000, 0).index;
  return d_ob(inc, orthonormal_basis(inc), index, exact.has_value());
}

Eigen::VectorXcd l2_vector(const AlgebraShape& shape, const Element& y) {
  Eigen::VectorXcd v(shape.linear_dim());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < shape.num_blocks(); ++l) {
    const int d = shape.dim(l);
    const double w = std::sqrt(shape.weight(l));
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) v(at++) = w * y.block(l)(i, j);
  }
  return v;
}

Matrix left_multiplication(const Element& x) {
  const AlgebraShape& shape = x.shape();
  const Eigen::Index n = shape.linear_dim();
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < shape.num_blocks(); ++l) {
    const int d = shape.dim(l);
    for (int j = 0; j < d; ++j) {
      out.block(at, at, d, d) = x.block(l);
      at += d;
    }
  }
  return out;
}

complex basic_trace(const Inclusion& inc, const OrthonormalBasis& basis, double lambda, const Matrix& t) {
  complex s = 0.0;
  for (const auto& m : basis.elements) {
    const Eigen::VectorXcd v = l2_vector(inc.m_shape(), m);
    s += v.dot(t * v);
  }
  return lambda * s;
}

BasicConstruction basic_construction(const Inclusion& inc, std::uint64_t seed, int samples, long budget,
                                     std::optional<double> index_override) {
  const AlgebraShape& ms = inc.m_shape();
  const AlgebraShape& ns = inc.n_shape();
  const long dim = ms.linear_dim();
  if (dim > budget)
    throw ResourceError("basic construction: L^2(M) has dimension " + std::to_string(dim) + ", budget is " +
                        std::to_string(budget));
  BasicConstruction bc;
  bc.l2_dim = dim;

  Matrix b(dim, ns.linear_dim());
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < ns.num_blocks(); ++k) {
    const double scale = 1.0 / std::sqrt(ns.weight(k));
    for (int j = 0; j < ns.dim(k); ++j)
      for (int i = 0; i < ns.dim(k); ++i) b.col(col++) = scale * l2_vector(ms, inc.n_matrix_unit(k, i, j));
  }
  bc.e_n = b * b.adjoint();

  const auto exact = inc.exact_index();
  double index = 0.0;
  if (index_override) {
    index = *index_override;
  } else if (exact) {
    index = *exact;
    bc.index_exact = true;
  } else {
    index = pp_index_estimate(inc, 2000, derive_seed(seed, "basic-index", 0)).index;
  }
  bc.lambda = 1.0 / index;

  const OrthonormalBasis basis = orthonormal_basis(inc);
  bc.tau1_e = basic_trace(inc, basis, bc.lambda, bc.e_n).real();
  for (int s = 0; s < samples; ++s) {
    const Element x = random_contraction(ms, derive_seed(seed, "basic-x", static_cast<std::uint64_t>(s)));
    const Matrix lx = left_multiplication(x);
    const Matrix lhs = bc.e_n * lx * bc.e_n;
    const Matrix rhs = left_multiplication(inc.cond_exp_n(x)) * bc.e_n;
    bc.jones_residual = std::max(bc.jones_residual, (lhs - rhs).norm());

    const Element y = inc.embed(random_contraction(ns, derive_seed(seed, "basic-y", static_cast<std::uint64_t>(s))));
    const Matrix ly = left_multiplication(y);
    bc.commute_residual = std::max(bc.commute_residual, (bc.e_n * ly - ly * bc.e_n).norm());

    const complex t1 = basic_trace(inc, basis, bc.lambda, bc.e_n * lx);
    bc.trace_identity_residual = std::max(bc.trace_identity_residual, std::abs(t1 - bc.lambda * trace(x)));
  }
  return bc;
}

}  // namespace paving
