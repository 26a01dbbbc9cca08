#include "paving/lemma13.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paving/bounds.hpp"

namespace paving {

namespace {

// Orthonormal basis of the orthogonal complement of the columns of s in C^d.
Matrix complement(const Matrix& s, int d) {
  if (s.cols() == 0) return Matrix::Identity(d, d);
  Eigen::HouseholderQR<Matrix> qr(s);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - s.cols());
}

}  // namespace

std::vector<std::vector<Matrix>> cyclic_refinement(const std::vector<int>& dims, const std::vector<Matrix>& support,
                                                   int m, Rng& rng) {
  if (m < 1) throw PreconditionError("cyclic_refinement: m must be >= 1");
  if (support.size() != dims.size()) throw MalformedElementError("cyclic_refinement: support block count mismatch");
  const std::size_t nb = dims.size();
  std::vector<std::vector<Matrix>> frames(m, std::vector<Matrix>(nb));
  int next = 0;  // round-robin cursor for leftover dimensions, shared across blocks
  for (std::size_t k = 0; k < nb; ++k) {
    const int d = dims[k];
    const int f = d / m;
    const Matrix& s = support[k];
    if (s.cols() > f) {
      std::ostringstream os;
      os << "support of dimension " << s.cols() << " in a block of dimension " << d << " does not fit under one of "
         << m << " equal pieces";
      throw InfeasibleError(os.str(), s.cols() > 0 ? static_cast<double>(d / s.cols()) : static_cast<double>(d));
    }
    Matrix rest = complement(s, d);
    if (rest.cols() > 0) rest = rest * haar_matrix(static_cast<int>(rest.cols()), rng);
    // pieces[j] holds e_{j+1}; e_1 = [support, first f - s columns of rest].
    std::vector<Matrix> pieces(m, Matrix(d, f));
    Eigen::Index used = 0;
    if (f > 0) {
      pieces[0].leftCols(s.cols()) = s;
      pieces[0].rightCols(f - s.cols()) = rest.middleCols(used, f - s.cols());
      used += f - s.cols();
      for (int j = 1; j < m; ++j) {
        pieces[j] = rest.middleCols(used, f);
        used += f;
      }
    }
    const Eigen::Index leftover = rest.cols() - used;
    std::vector<std::vector<Eigen::VectorXcd>> extra(m);
    for (Eigen::Index c = 0; c < leftover; ++c) extra[next++ % m].push_back(rest.col(used + c));

    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < m; ++j) {
      Matrix q(d, f + static_cast<Eigen::Index>(extra[j].size()));
      for (int t = 0; t < f; ++t) {
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(d);
        for (int a = 0; a < m; ++a) col += std::polar(norm, 2.0 * M_PI * a * j / m) * pieces[a].col(t);
        q.col(t) = col;
      }
      for (std::size_t e = 0; e < extra[j].size(); ++e) q.col(f + static_cast<Eigen::Index>(e)) = extra[j][e];
      frames[j][k] = std::move(q);
    }
  }
  return frames;
}

Lemma13Result lemma13_construct(const AlgebraShape& shape, const std::vector<Element>& F, double epsilon,
                                std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw PreconditionError("lemma13: epsilon must be positive");
  double max_norm = 0.0;
  std::vector<Projection> supports;
  double support_sum = 0.0;
  for (const auto& x : F) {
    require_same_shape(x, Element::zero(shape));
    max_norm = std::max(max_norm, op_norm(x));
    const Projection r = support_projection((x.adjoint() * x).hermitian_part());
    const Projection l = support_projection((x * x.adjoint()).hermitian_part());
    support_sum += r.trace();
    supports.push_back(l);
    supports.push_back(r);
  }
  Lemma13Result out;
  if (max_norm == 0.0) {
    out.partition = PartitionOfUnity::trivial(shape);
    out.m = 1;
    out.values.assign(F.size(), 0.0);
    out.bounds.assign(F.size(), 0.0);
    return out;
  }
  if (!(2.0 * support_sum < epsilon / max_norm)) {
    std::ostringstream os;
    os << "small-support condition fails: 2 sum tau(s(|x|)) = " << 2.0 * support_sum
       << " is not below epsilon / max ||x|| = " << epsilon / max_norm;
    throw InfeasibleError(os.str());
  }
  const int m = static_cast<int>(std::max(1L, guarded_ceil(max_norm / epsilon)));
  const Projection e = join(supports, shape);
  out.support_trace = e.trace();

  Rng rng(seed);
  std::vector<std::vector<Matrix>> frames;
  try {
    frames = cyclic_refinement(shape.block_dims(), e.frame(), m, rng);
  } catch (const InfeasibleError&) {
    int best = 0;
    for (int mm = m - 1; mm >= 1 && best == 0; --mm) {
      bool ok = true;
      for (std::size_t k = 0; k < shape.num_blocks(); ++k) ok = ok && e.rank(k) <= shape.dim(k) / mm;
      if (ok) best = mm;
    }
    std::ostringstream os;
    os << "no partition into " << m << " equal-trace projections has a piece containing the support (trace "
       << e.trace() << "); largest feasible m is " << best;
    throw InfeasibleError(os.str(), static_cast<double>(best));
  }
  std::vector<Projection> parts;
  for (auto& f : frames) parts.push_back(Projection::from_frame(shape, std::move(f)));
  out.partition = PartitionOfUnity(std::move(parts));
  out.m = m;
  for (const auto& x : F) {
    out.values.push_back(op_norm(pinch(out.partition, x)));
    out.bounds.push_back(op_norm(x) / m);
  }
  return out;
}

}  // namespace paving
