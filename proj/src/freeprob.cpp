#include "paving/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace paving {

RealVector centered_clipped_spectrum(int dim, Rng& rng) {
  RealVector s(dim);
  for (int i = 0; i < dim; ++i) s(i) = std::clamp(rng.normal(), -1.0, 1.0);
  s.array() -= s.mean();
  const double peak = s.cwiseAbs().maxCoeff();
  if (peak > 1.0) s /= peak;
  return s;
}

SampledPair sample_pair(int n, int dim, std::uint64_t seed) {
  if (n < 1 || dim < 1 || dim % n != 0)
    throw PreconditionError("sample_pair: n must divide dim (n = " + std::to_string(n) + ", dim = " +
                            std::to_string(dim) + ")");
  const AlgebraShape shape = AlgebraShape::full_matrix(dim);
  Rng rng(seed);
  const Matrix w = haar_matrix(dim, rng);
  const PartitionOfUnity p = rotated_partition(shape, {w}, n);
  const RealVector d = centered_clipped_spectrum(dim, rng);
  const Matrix w2 = haar_matrix(dim, rng);
  Matrix x = w2 * d.cast<complex>().asDiagonal() * w2.adjoint();
  x = 0.5 * (x + x.adjoint());
  return SampledPair{cyclic_unitary_from_partition(p), Element(shape, {x})};
}

double freeness_defect(const CyclicUnitary& v, const Element& x, int max_word_len) {
  if (max_word_len < 1) throw PreconditionError("freeness_defect: max_word_len must be >= 1");
  const int n = v.order;
  if (n <= 1) return 0.0;
  const AlgebraShape& shape = x.shape();
  const Element xc = x - Element::scalar(shape, trace(x));
  double worst = 0.0;
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
    // x in v's eigenbasis; v acts there as a diagonal of roots of unity.
    const Matrix basis = v.partition.stacked(k);
    const Matrix xt = basis.adjoint() * xc.block(k) * basis;
    Eigen::VectorXi power(basis.cols());
    Eigen::Index at = 0;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < v.partition.part(i).rank(k); ++c) power(at++) = i;
    const double tk = shape.weight(k);
    std::vector<complex> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = std::polar(1.0, 2.0 * M_PI * i / n);

    std::function<void(const Matrix&, int)> walk = [&](const Matrix& prefix, int depth) {
      if (depth == max_word_len) return;
      for (int e = 1; e < n; ++e) {
        Matrix scaled = prefix;
        for (Eigen::Index c = 0; c < scaled.cols(); ++c) scaled.col(c) *= roots[(power(c) * e) % n];
        const Matrix word = scaled * xt;
        worst = std::max(worst, std::abs(tk * word.trace()));
        walk(word, depth + 1);
      }
    };
    walk(xt, 0);
  }
  return worst;
}

KestenResult run_kesten(const KestenExperiment& exp) {
  if (exp.n < 2) throw PreconditionError("run_kesten: n must be >= 2 (n = 1 pinches by {1})");
  if (exp.dim % exp.n != 0) throw PreconditionError("run_kesten: n must divide dim");
  if (exp.trials < 1) throw PreconditionError("run_kesten: trials must be >= 1");
  KestenResult res;
  res.experiment = exp;
  res.bound = kesten_bound(exp.n);
  const int part = exp.dim / exp.n;
  for (int t = 0; t < exp.trials; ++t) {
    Rng rng(derive_seed(exp.seed, "kesten", static_cast<std::uint64_t>(t)));
    const RealVector d = centered_clipped_spectrum(exp.dim, rng);
    const Matrix w = haar_matrix(exp.dim, rng);
    KestenTrial tr;
    tr.trial = t;
    // Minimal projection j belongs to part j mod n, as in the balanced labelling.
    for (int k = 0; k < exp.n; ++k) {
      Matrix rows(part, exp.dim);
      for (int i = 0; i < part; ++i) rows.row(i) = w.row(i * exp.n + k);
      const Matrix block = rows * d.cast<complex>().asDiagonal() * rows.adjoint();
      tr.norm = std::max(tr.norm, matrix_op_norm(0.5 * (block + block.adjoint())));
    }
    if (exp.defect_word_len > 0) {
      const AlgebraShape shape = AlgebraShape::full_matrix(exp.dim);
      const PartitionOfUnity p = rotated_partition(shape, {Matrix::Identity(exp.dim, exp.dim)}, exp.n);
      Matrix x = w * d.cast<complex>().asDiagonal() * w.adjoint();
      tr.defect = freeness_defect(cyclic_unitary_from_partition(p), Element(shape, {0.5 * (x + x.adjoint())}),
                                  exp.defect_word_len);
    }
    res.trials.push_back(tr);
  }
  double sum = 0.0;
  for (const auto& tr : res.trials) {
    res.max = std::max(res.max, tr.norm);
    sum += tr.norm;
    if (tr.norm > res.bound + exp.slack) ++res.exceedances;
  }
  res.mean = sum / static_cast<double>(res.trials.size());
  return res;
}

}  // namespace paving
