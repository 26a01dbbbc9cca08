#include "paving/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "paving/rng.hpp"

namespace paving {

namespace {

bool is_finite(const Matrix& m) { return m.allFinite(); }

// Eigen decomposition of the Hermitian part of a block; values ascending.
Eigen::SelfAdjointEigenSolver<Matrix> hermitian_solver(const Matrix& m, bool vectors) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return es;
}

Matrix select_columns(const Matrix& m, const std::vector<Eigen::Index>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- AlgebraShape

AlgebraShape::AlgebraShape(std::vector<int> block_dims, std::vector<double> trace_weights)
    : dims_(std::move(block_dims)), weights_(std::move(trace_weights)) {
  if (dims_.empty()) throw SpecError("algebra shape needs at least one block");
  if (dims_.size() != weights_.size())
    throw SpecError("algebra shape: " + std::to_string(dims_.size()) + " block dims but " +
                    std::to_string(weights_.size()) + " trace weights");
  double total = 0.0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] < 1) throw SpecError("algebra shape: block " + std::to_string(k) + " has dimension < 1");
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k]))
      throw SpecError("algebra shape: block " + std::to_string(k) + " has non-positive trace weight");
    total += weights_[k] * dims_[k];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "algebra shape: sum_k t_k n_k = " << total << ", expected 1";
    throw SpecError(os.str());
  }
}

AlgebraShape AlgebraShape::full_matrix(int n) { return AlgebraShape({n}, {1.0 / n}); }

AlgebraShape AlgebraShape::proportional(std::vector<int> block_dims) {
  std::vector<double> w(block_dims.size(), 1.0);
  return normalized(std::move(block_dims), std::move(w));
}

AlgebraShape AlgebraShape::normalized(std::vector<int> block_dims, std::vector<double> raw_weights) {
  if (block_dims.size() != raw_weights.size()) throw SpecError("algebra shape: dims/weights length mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < block_dims.size(); ++k) total += raw_weights[k] * block_dims[k];
  if (!(total > 0.0)) throw SpecError("algebra shape: weights must be positive");
  for (double& w : raw_weights) w /= total;
  return AlgebraShape(std::move(block_dims), std::move(raw_weights));
}

int AlgebraShape::total_dim() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }

long AlgebraShape::linear_dim() const {
  long s = 0;
  for (int d : dims_) s += static_cast<long>(d) * d;
  return s;
}

// --------------------------------------------------------------------- Element

Element::Element(AlgebraShape shape, std::vector<Matrix> blocks) : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (blocks_.size() != shape_.num_blocks())
    throw MalformedElementError("element has " + std::to_string(blocks_.size()) + " blocks, shape has " +
                                std::to_string(shape_.num_blocks()));
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].rows() != shape_.dim(k) || blocks_[k].cols() != shape_.dim(k))
      throw MalformedElementError("element block " + std::to_string(k) + " is " + std::to_string(blocks_[k].rows()) +
                                  "x" + std::to_string(blocks_[k].cols()) + ", expected " +
                                  std::to_string(shape_.dim(k)));
  }
}

Element Element::zero(const AlgebraShape& shape) {
  std::vector<Matrix> b;
  b.reserve(shape.num_blocks());
  for (int d : shape.block_dims()) b.push_back(Matrix::Zero(d, d));
  return Element(shape, std::move(b));
}

Element Element::identity(const AlgebraShape& shape) { return scalar(shape, 1.0); }

Element Element::scalar(const AlgebraShape& shape, complex c) {
  std::vector<Matrix> b;
  b.reserve(shape.num_blocks());
  for (int d : shape.block_dims()) b.push_back(c * Matrix::Identity(d, d));
  return Element(shape, std::move(b));
}

Element Element::adjoint() const {
  std::vector<Matrix> b;
  b.reserve(blocks_.size());
  for (const auto& m : blocks_) b.push_back(m.adjoint());
  return Element(shape_, std::move(b));
}

Element Element::hermitian_part() const {
  std::vector<Matrix> b;
  b.reserve(blocks_.size());
  for (const auto& m : blocks_) b.push_back(0.5 * (m + m.adjoint()));
  return Element(shape_, std::move(b));
}

void require_same_shape(const Element& a, const Element& b) {
  if (!(a.shape() == b.shape())) throw MalformedElementError("operands live in algebras of different shape");
}

Element& Element::operator+=(const Element& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

Element& Element::operator*=(complex c) {
  for (auto& m : blocks_) m *= c;
  return *this;
}

Element operator+(Element a, const Element& b) { return a += b; }
Element operator-(Element a, const Element& b) { return a -= b; }
Element operator*(complex c, Element a) { return a *= c; }
Element operator*(Element a, complex c) { return a *= c; }

Element operator*(const Element& a, const Element& b) {
  require_same_shape(a, b);
  std::vector<Matrix> out;
  out.reserve(a.num_blocks());
  for (std::size_t k = 0; k < a.num_blocks(); ++k) out.push_back(a.block(k) * b.block(k));
  return Element(a.shape(), std::move(out));
}

// ------------------------------------------------------------------ scalars

complex trace(const Element& x) {
  complex t = 0.0;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) t += x.shape().weight(k) * x.block(k).trace();
  return t;
}

double matrix_op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (!is_finite(m)) throw NumericError("non-finite entries in op_norm input");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed in op_norm");
    return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(es.eigenvalues().size() - 1)));
  }
  Matrix g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed in op_norm");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double op_norm(const Element& x) {
  double n = 0.0;
  for (const auto& b : x.blocks()) n = std::max(n, matrix_op_norm(b));
  return n;
}

double l2_norm(const Element& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    if (!is_finite(x.block(k))) throw NumericError("non-finite entries in l2_norm input");
    s += x.shape().weight(k) * x.block(k).squaredNorm();
  }
  return std::sqrt(s);
}

double hermiticity_residual(const Element& x) {
  double r = 0.0;
  for (const auto& b : x.blocks()) r = std::max(r, (b - b.adjoint()).norm());
  return r;
}

double min_eigenvalue(const Element& x) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : x.blocks()) lo = std::min(lo, hermitian_solver(b, false).eigenvalues()(0));
  return lo;
}

HermEig herm_eig(const Element& x) {
  const double res = hermiticity_residual(x);
  if (res > kTolProj) throw PreconditionError("herm_eig: input is not Hermitian", res);
  HermEig out;
  for (const auto& b : x.blocks()) {
    auto es = hermitian_solver(b, true);
    out.values.push_back(es.eigenvalues());
    out.vectors.push_back(es.eigenvectors());
  }
  return out;
}

// ------------------------------------------------------------------ Projection

Projection Projection::from_frame(AlgebraShape shape, std::vector<Matrix> frame, double tol) {
  if (frame.size() != shape.num_blocks()) throw MalformedElementError("projection frame block count mismatch");
  for (std::size_t k = 0; k < frame.size(); ++k) {
    if (frame[k].rows() != shape.dim(k)) throw MalformedElementError("projection frame has wrong row count");
    if (frame[k].cols() > shape.dim(k)) throw PreconditionError("projection frame has more columns than rows");
    if (frame[k].cols() == 0) continue;
    const double res = (frame[k].adjoint() * frame[k] - Matrix::Identity(frame[k].cols(), frame[k].cols())).norm();
    if (res > tol) throw PreconditionError("projection frame columns are not orthonormal", res);
  }
  return Projection(std::move(shape), std::move(frame));
}

Projection Projection::from_element(const Element& p, double tol) {
  const double herm = hermiticity_residual(p);
  if (herm > tol) throw PreconditionError("not a projection: ||p - p*|| too large", herm);
  std::vector<Matrix> frame;
  for (const auto& b : p.blocks()) {
    auto es = hermitian_solver(b, true);
    const RealVector& lam = es.eigenvalues();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double idem = std::abs(lam(i) * lam(i) - lam(i));
      if (idem > tol) throw PreconditionError("not a projection: ||p^2 - p|| too large", idem);
      if (lam(i) > 0.5) keep.push_back(i);
    }
    frame.push_back(select_columns(es.eigenvectors(), keep));
  }
  return Projection(p.shape(), std::move(frame));
}

Projection Projection::zero(const AlgebraShape& shape) {
  std::vector<Matrix> f;
  for (int d : shape.block_dims()) f.push_back(Matrix(d, 0));
  return Projection(shape, std::move(f));
}

Projection Projection::identity(const AlgebraShape& shape) {
  std::vector<Matrix> f;
  for (int d : shape.block_dims()) f.push_back(Matrix::Identity(d, d));
  return Projection(shape, std::move(f));
}

int Projection::total_rank() const {
  int r = 0;
  for (const auto& f : frame_) r += static_cast<int>(f.cols());
  return r;
}

double Projection::trace() const {
  double t = 0.0;
  for (std::size_t k = 0; k < frame_.size(); ++k) t += shape_.weight(k) * static_cast<double>(frame_[k].cols());
  return t;
}

Element Projection::element() const {
  std::vector<Matrix> b;
  b.reserve(frame_.size());
  for (const auto& f : frame_) b.push_back(f * f.adjoint());
  return Element(shape_, std::move(b));
}

Projection join(std::span<const Projection> ps, const AlgebraShape& shape) {
  std::vector<Matrix> frame;
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
    Eigen::Index cols = 0;
    for (const auto& p : ps) cols += p.frame(k).cols();
    Matrix s(shape.dim(k), cols);
    Eigen::Index at = 0;
    for (const auto& p : ps) {
      s.middleCols(at, p.frame(k).cols()) = p.frame(k);
      at += p.frame(k).cols();
    }
    if (cols == 0) {
      frame.push_back(Matrix(shape.dim(k), 0));
      continue;
    }
    // Range of s from the eigenvectors of the Gram matrix s*s.
    Matrix gram = s.adjoint() * s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 1e-10) keep.push_back(i);
    Matrix f(shape.dim(k), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      f.col(static_cast<Eigen::Index>(j)) = s * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
    // One pass of re-orthonormalization keeps the frame exact.
    Eigen::HouseholderQR<Matrix> qr(f);
    frame.push_back(qr.householderQ() * Matrix::Identity(f.rows(), f.cols()));
  }
  return Projection::from_frame(shape, std::move(frame));
}

SpectralProjectionResult spectral_projection(const Element& x, double lo, double hi) {
  HermEig eig = herm_eig(x);
  SpectralProjectionResult out;
  std::vector<Matrix> frame;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < eig.values[k].size(); ++i) {
      const double l = eig.values[k](i);
      if (std::abs(l - lo) <= kBoundaryWindow || (std::isfinite(hi) && std::abs(l - hi) <= kBoundaryWindow))
        out.boundary_warning = true;
      if (l >= lo && l < hi) keep.push_back(i);
    }
    frame.push_back(select_columns(eig.vectors[k], keep));
  }
  out.projection = Projection::from_frame(x.shape(), std::move(frame));
  return out;
}

Projection support_projection(const Element& b, double rank_tol) {
  HermEig eig = herm_eig(b);
  double norm = 0.0;
  for (const auto& v : eig.values)
    if (v.size() > 0) norm = std::max({norm, std::abs(v(0)), std::abs(v(v.size() - 1))});
  const double cut = rank_tol * norm;
  std::vector<Matrix> frame;
  for (std::size_t k = 0; k < b.num_blocks(); ++k) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < eig.values[k].size(); ++i) {
      const double l = eig.values[k](i);
      if (l < -cut) throw PreconditionError("support_projection: input is not positive semidefinite", -l);
      if (norm > 0.0 && l > cut) keep.push_back(i);
    }
    frame.push_back(select_columns(eig.vectors[k], keep));
  }
  return Projection::from_frame(b.shape(), std::move(frame));
}

// ------------------------------------------------------------ PartitionOfUnity

PartitionOfUnity::PartitionOfUnity(std::vector<Projection> parts, double tol) : parts_(std::move(parts)) {
  if (parts_.empty()) throw PreconditionError("partition of unity needs at least one projection");
  shape_ = parts_.front().shape();
  for (const auto& p : parts_)
    if (!(p.shape() == shape_)) throw MalformedElementError("partition parts live in different algebras");
  for (std::size_t k = 0; k < shape_.num_blocks(); ++k) {
    Matrix v = stacked(k);
    if (v.cols() != shape_.dim(k)) {
      std::ostringstream os;
      os << "projections do not form a partition of 1: block " << k << " has total rank " << v.cols()
         << ", dimension " << shape_.dim(k);
      throw PreconditionError(os.str(), 1.0);
    }
    const double res = (v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())).norm();
    if (res > tol) throw PreconditionError("projections are not mutually orthogonal / do not sum to 1", res);
  }
}

PartitionOfUnity PartitionOfUnity::trivial(const AlgebraShape& shape) {
  return PartitionOfUnity({Projection::identity(shape)});
}

Matrix PartitionOfUnity::stacked(std::size_t k) const {
  Eigen::Index cols = 0;
  for (const auto& p : parts_) cols += p.frame(k).cols();
  Matrix v(shape_.dim(k), cols);
  Eigen::Index at = 0;
  for (const auto& p : parts_) {
    v.middleCols(at, p.frame(k).cols()) = p.frame(k);
    at += p.frame(k).cols();
  }
  return v;
}

CyclicUnitary cyclic_unitary_from_partition(const PartitionOfUnity& partition) {
  const int n = static_cast<int>(partition.size());
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < partition.shape().num_blocks(); ++k) {
    Matrix v = partition.stacked(k);
    Eigen::VectorXcd phase(v.cols());
    Eigen::Index at = 0;
    for (int i = 0; i < n; ++i) {
      const complex a = std::polar(1.0, 2.0 * M_PI * i / n);
      for (Eigen::Index c = 0; c < partition.part(i).frame(k).cols(); ++c) phase(at++) = a;
    }
    blocks.push_back(v * phase.asDiagonal() * v.adjoint());
  }
  return CyclicUnitary{Element(partition.shape(), std::move(blocks)), n, partition};
}

Element pinch(const PartitionOfUnity& partition, const Element& x) {
  if (!(partition.shape() == x.shape())) throw MalformedElementError("pinch: partition and element shapes differ");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    Matrix v = partition.stacked(k);
    Matrix y = v.adjoint() * x.block(k) * v;
    Matrix masked = Matrix::Zero(y.rows(), y.cols());
    Eigen::Index at = 0;
    for (const auto& p : partition.parts()) {
      const Eigen::Index r = p.frame(k).cols();
      masked.block(at, at, r, r) = y.block(at, at, r, r);
      at += r;
    }
    out.push_back(v * masked * v.adjoint());
  }
  return Element(x.shape(), std::move(out));
}

double unitarity_residual(const Element& u) {
  double r = 0.0;
  for (const auto& b : u.blocks()) r = std::max(r, (b * b.adjoint() - Matrix::Identity(b.rows(), b.cols())).norm());
  return r;
}

Element unitary_average(std::span<const Element> unitaries, const Element& x) {
  if (unitaries.empty()) throw PreconditionError("unitary_average: empty unitary list");
  Element acc = Element::zero(x.shape());
  for (const auto& u : unitaries) {
    require_same_shape(u, x);
    const double res = unitarity_residual(u);
    if (res > kTolProj) throw PreconditionError("unitary_average: entry is not unitary", res);
    acc += u * x * u.adjoint();
  }
  acc *= complex(1.0 / static_cast<double>(unitaries.size()));
  return acc;
}

// ---------------------------------------------------------------- sampling

Matrix haar_matrix(int n, Rng& rng) {
  Matrix g = rng.ginibre(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : complex(1.0));
  }
  return q;
}

Element random_haar_unitary(const AlgebraShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> b;
  for (int d : shape.block_dims()) b.push_back(haar_matrix(d, rng));
  return Element(shape, std::move(b));
}

std::optional<std::vector<int>> realizable_ranks(const AlgebraShape& shape, double theta) {
  const std::size_t nb = shape.num_blocks();
  double combos = 1.0;
  for (int d : shape.block_dims()) combos *= (d + 1);
  if (combos <= 2e6) {
    std::vector<int> r(nb, 0);
    while (true) {
      double t = 0.0;
      for (std::size_t k = 0; k < nb; ++k) t += shape.weight(k) * r[k];
      if (std::abs(t - theta) <= 1e-9) return r;
      std::size_t k = 0;
      while (k < nb && ++r[k] > shape.dim(k)) r[k++] = 0;
      if (k == nb) break;
    }
    return std::nullopt;
  }
  // Greedy fill for large shapes.
  std::vector<int> r(nb, 0);
  double rem = theta;
  for (std::size_t k = 0; k < nb; ++k) {
    r[k] = std::clamp(static_cast<int>(std::floor(rem / shape.weight(k) + 1e-9)), 0, shape.dim(k));
    rem -= r[k] * shape.weight(k);
  }
  if (std::abs(rem) <= 1e-9) return r;
  return std::nullopt;
}

double nearest_realizable_trace(const AlgebraShape& shape, double theta) {
  const std::size_t nb = shape.num_blocks();
  double combos = 1.0;
  for (int d : shape.block_dims()) combos *= (d + 1);
  double best = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  if (combos <= 2e6) {
    std::vector<int> r(nb, 0);
    while (true) {
      double t = 0.0;
      for (std::size_t k = 0; k < nb; ++k) t += shape.weight(k) * r[k];
      if (std::abs(t - theta) < best_gap) {
        best_gap = std::abs(t - theta);
        best = t;
      }
      std::size_t k = 0;
      while (k < nb && ++r[k] > shape.dim(k)) r[k++] = 0;
      if (k == nb) break;
    }
    return best;
  }
  double rem = theta;
  double t = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const int rk = std::clamp(static_cast<int>(std::round(rem / shape.weight(k))), 0, shape.dim(k));
    rem -= rk * shape.weight(k);
    t += rk * shape.weight(k);
  }
  return t;
}

Projection random_projection(const AlgebraShape& shape, double theta, std::uint64_t seed) {
  auto ranks = realizable_ranks(shape, theta);
  if (!ranks) {
    const double nearest = nearest_realizable_trace(shape, theta);
    std::ostringstream os;
    os << "projection trace " << theta << " is not realizable; nearest realizable trace is " << nearest;
    throw InfeasibleError(os.str(), nearest);
  }
  Rng rng(seed);
  std::vector<Matrix> frame;
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
    Matrix u = haar_matrix(shape.dim(k), rng);
    frame.push_back(u.leftCols((*ranks)[k]));
  }
  return Projection::from_frame(shape, std::move(frame));
}

Element random_element(const AlgebraShape& shape, RandomKind kind, std::uint64_t seed, double theta) {
  if (kind == RandomKind::projection) return random_projection(shape, theta, seed).element();

  Rng rng(seed);
  std::vector<RealVector> spectra;
  for (int d : shape.block_dims()) {
    RealVector s(d);
    for (int i = 0; i < d; ++i) {
      if (kind == RandomKind::positive_contraction)
        s(i) = rng.uniform();
      else
        s(i) = std::clamp(rng.normal(), -1.0, 1.0);
    }
    spectra.push_back(std::move(s));
  }
  if (kind == RandomKind::selfadjoint_trace_zero_contraction) {
    double mean = 0.0;
    for (std::size_t k = 0; k < spectra.size(); ++k) mean += shape.weight(k) * spectra[k].sum();
    double peak = 0.0;
    for (auto& s : spectra) {
      s.array() -= mean;
      peak = std::max(peak, s.cwiseAbs().maxCoeff());
    }
    if (peak > 1.0)
      for (auto& s : spectra) s /= peak;
  }
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    Matrix u = haar_matrix(shape.dim(k), rng);
    blocks.push_back(u * spectra[k].cast<complex>().asDiagonal() * u.adjoint());
  }
  return Element(shape, std::move(blocks));
}

Element random_contraction(const AlgebraShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(rng.ginibre(d, d));
  Element x(shape, std::move(blocks));
  const double n = op_norm(x);
  if (n > 0.0) x *= complex(1.0 / n);
  return x;
}

std::vector<std::vector<int>> balanced_labels(const AlgebraShape& shape, int r) {
  if (r < 1) throw PreconditionError("partition size must be at least 1");
  if (r > shape.total_dim()) {
    std::ostringstream os;
    os << "a partition into " << r << " nonzero projections needs at least " << r
       << " minimal projections; the algebra has " << shape.total_dim();
    throw InfeasibleError(os.str(), static_cast<double>(shape.total_dim()));
  }
  std::vector<std::vector<int>> labels;
  int pos = 0;
  for (int d : shape.block_dims()) {
    std::vector<int> l(d);
    for (int i = 0; i < d; ++i) l[i] = (pos++) % r;
    labels.push_back(std::move(l));
  }
  return labels;
}

PartitionOfUnity rotated_partition(const AlgebraShape& shape, const std::vector<Matrix>& u, int r) {
  auto labels = balanced_labels(shape, r);
  std::vector<Projection> parts;
  for (int i = 0; i < r; ++i) {
    std::vector<Matrix> frame;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
      std::vector<Eigen::Index> cols;
      for (int j = 0; j < shape.dim(k); ++j)
        if (labels[k][j] == i) cols.push_back(j);
      frame.push_back(select_columns(u[k], cols));
    }
    parts.push_back(Projection::from_frame(shape, std::move(frame)));
  }
  return PartitionOfUnity(std::move(parts));
}

PartitionOfUnity haar_balanced_partition(const AlgebraShape& shape, int r, std::uint64_t seed) {
  balanced_labels(shape, r);  // validates r before sampling
  Element u = random_haar_unitary(shape, seed);
  return rotated_partition(shape, u.blocks(), r);
}

}  // namespace paving
