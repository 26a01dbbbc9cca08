#pragma once

// Finite direct sums of complex matrix algebras with a faithful normalized
// trace: the desk-scale stand-in for a tracial von Neumann algebra.

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "paving/error.hpp"
#include "paving/rng.hpp"

namespace paving {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Tolerance for algebraic identities (idempotence, unitarity, partition sums).
inline constexpr double kTolProj = 1e-8;
/// Relative tolerance for spectral reconstructions.
inline constexpr double kTolSpectral = 1e-10;
/// Eigenvalues closer than this to an interval endpoint raise a boundary warning.
inline constexpr double kBoundaryWindow = 1e-12;

/// Block dimensions n_k and minimal-projection traces t_k with sum_k t_k n_k = 1.
class AlgebraShape {
 public:
  AlgebraShape() = default;
  /// Throws SpecError unless all n_k >= 1, t_k > 0 and sum t_k n_k = 1 (to 1e-9).
  AlgebraShape(std::vector<int> block_dims, std::vector<double> trace_weights);

  /// M_n with its normalized trace.
  static AlgebraShape full_matrix(int n);
  /// Blocks with the trace proportional to the unnormalized matrix trace.
  static AlgebraShape proportional(std::vector<int> block_dims);
  /// Rescales arbitrary positive weights so the trace is normalized.
  static AlgebraShape normalized(std::vector<int> block_dims, std::vector<double> raw_weights);

  std::size_t num_blocks() const { return dims_.size(); }
  int dim(std::size_t k) const { return dims_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  const std::vector<int>& block_dims() const { return dims_; }
  const std::vector<double>& trace_weights() const { return weights_; }
  /// sum_k n_k: the number of minimal projections in a maximal partition.
  int total_dim() const;
  /// sum_k n_k^2: the linear dimension.
  long linear_dim() const;
  bool is_factor() const { return dims_.size() == 1; }

  friend bool operator==(const AlgebraShape&, const AlgebraShape&) = default;

 private:
  std::vector<int> dims_;
  std::vector<double> weights_;
};

/// An element of the algebra: one square complex block per shape block.
class Element {
 public:
  Element() = default;
  /// Throws MalformedElementError when block count or sizes disagree with the shape.
  Element(AlgebraShape shape, std::vector<Matrix> blocks);

  static Element zero(const AlgebraShape& shape);
  static Element identity(const AlgebraShape& shape);
  static Element scalar(const AlgebraShape& shape, complex c);

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }
  std::size_t num_blocks() const { return blocks_.size(); }

  Element adjoint() const;
  /// (x + x*) / 2
  Element hermitian_part() const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(complex c);

 private:
  AlgebraShape shape_;
  std::vector<Matrix> blocks_;
};

Element operator+(Element a, const Element& b);
Element operator-(Element a, const Element& b);
Element operator*(const Element& a, const Element& b);
Element operator*(complex c, Element a);
Element operator*(Element a, complex c);

/// Throws MalformedElementError when shapes differ.
void require_same_shape(const Element& a, const Element& b);

/// tau(x) = sum_k t_k Tr(x_k)
complex trace(const Element& x);
/// Largest singular value over all blocks, from Hermitian eigenvalues of x
/// (when x is Hermitian) or of x*x. Throws NumericError on non-finite entries.
double op_norm(const Element& x);
/// sqrt(tau(x*x))
double l2_norm(const Element& x);
/// Largest block-wise Frobenius norm of x - x*.
double hermiticity_residual(const Element& x);
/// Smallest eigenvalue of the Hermitian part over all blocks.
double min_eigenvalue(const Element& x);

/// Largest singular value of a single dense matrix.
double matrix_op_norm(const Matrix& m);

struct HermEig {
  std::vector<RealVector> values;  // ascending, per block
  std::vector<Matrix> vectors;     // unitary diagonalizers, per block
};

/// Throws PreconditionError when ||x - x*|| exceeds kTolProj.
HermEig herm_eig(const Element& x);

/// An orthogonal projection, stored as an orthonormal frame per block, so it
/// is an exact idempotent up to the frame's orthonormality.
class Projection {
 public:
  Projection() = default;

  /// Frame columns must be orthonormal to `tol` (Frobenius).
  static Projection from_frame(AlgebraShape shape, std::vector<Matrix> frame, double tol = kTolProj);
  /// Checks ||p - p*|| and ||p^2 - p|| against `tol`, then re-extracts an
  /// exact frame from the eigenvectors with eigenvalue above 1/2.
  static Projection from_element(const Element& p, double tol = kTolProj);
  static Projection zero(const AlgebraShape& shape);
  static Projection identity(const AlgebraShape& shape);

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<Matrix>& frame() const { return frame_; }
  const Matrix& frame(std::size_t k) const { return frame_[k]; }
  int rank(std::size_t k) const { return static_cast<int>(frame_[k].cols()); }
  int total_rank() const;
  bool is_zero() const { return total_rank() == 0; }
  double trace() const;
  Element element() const;

 private:
  Projection(AlgebraShape shape, std::vector<Matrix> frame) : shape_(std::move(shape)), frame_(std::move(frame)) {}
  AlgebraShape shape_;
  std::vector<Matrix> frame_;
};

/// Projection onto the span of the ranges of the given projections.
Projection join(std::span<const Projection> ps, const AlgebraShape& shape);

struct SpectralProjectionResult {
  Projection projection;
  bool boundary_warning = false;  // an eigenvalue sits within 1e-12 of an endpoint
};

/// Projection onto eigenvectors of Hermitian x with eigenvalue in [lo, hi).
/// Eigenvalues are compared exactly as computed.
SpectralProjectionResult spectral_projection(const Element& x, double lo,
                                             double hi = std::numeric_limits<double>::infinity());

/// s(b): projection onto eigenvectors of PSD b with eigenvalue > rank_tol * ||b||.
/// Throws PreconditionError when b is not PSD to -rank_tol * ||b||.
Projection support_projection(const Element& b, double rank_tol = 1e-9);

/// Projections p_1..p_r summing to 1.
class PartitionOfUnity {
 public:
  PartitionOfUnity() = default;
  /// Throws PreconditionError with the residual when the parts are not
  /// mutually orthogonal or do not sum to 1 within `tol`.
  explicit PartitionOfUnity(std::vector<Projection> parts, double tol = kTolProj);
  static PartitionOfUnity trivial(const AlgebraShape& shape);

  const AlgebraShape& shape() const { return shape_; }
  std::size_t size() const { return parts_.size(); }
  const std::vector<Projection>& parts() const { return parts_; }
  const Projection& part(std::size_t i) const { return parts_[i]; }
  /// Block k's frames side by side: a unitary whose columns are grouped by part.
  Matrix stacked(std::size_t k) const;

 private:
  AlgebraShape shape_;
  std::vector<Projection> parts_;
};

/// v = sum_k alpha^(k-1) p_k with alpha = exp(2 pi i / n); v^n = 1.
struct CyclicUnitary {
  Element v;
  int order = 1;
  PartitionOfUnity partition;  // spectral projections of v, p_k <-> alpha^(k-1)
};

CyclicUnitary cyclic_unitary_from_partition(const PartitionOfUnity& partition);

/// sum_i p_i x p_i
Element pinch(const PartitionOfUnity& partition, const Element& x);
/// (1/n) sum_i u_i x u_i*. Throws PreconditionError for an empty list or a
/// non-unitary entry.
Element unitary_average(std::span<const Element> unitaries, const Element& x);
/// max ||u u* - 1|| estimate (Frobenius) over blocks
double unitarity_residual(const Element& u);

/// Haar unitary of size n from QR of a Ginibre matrix, R's diagonal phases
/// absorbed into Q.
Matrix haar_matrix(int n, Rng& rng);
/// Block-wise Haar unitary.
Element random_haar_unitary(const AlgebraShape& shape, std::uint64_t seed);

enum class RandomKind {
  selfadjoint_trace_zero_contraction,
  positive_contraction,
  projection,
};

/// Random element of the requested class. For `projection`, `theta` is the
/// trace; throws InfeasibleError (with the nearest realizable trace) when no
/// integer rank vector realizes it to within 1e-9.
Element random_element(const AlgebraShape& shape, RandomKind kind, std::uint64_t seed, double theta = 0.5);
Projection random_projection(const AlgebraShape& shape, double theta, std::uint64_t seed);

/// Integer ranks r_k <= n_k with sum_k t_k r_k = theta, if any.
std::optional<std::vector<int>> realizable_ranks(const AlgebraShape& shape, double theta);
/// Closest trace value that integer ranks can realize.
double nearest_realizable_trace(const AlgebraShape& shape, double theta);

/// Balanced diagonal partition: minimal position j (counted across blocks)
/// goes to part j mod r. Part sizes differ by at most one.
std::vector<std::vector<int>> balanced_labels(const AlgebraShape& shape, int r);
/// u P0 u* for the balanced diagonal partition P0 and a block unitary u.
PartitionOfUnity rotated_partition(const AlgebraShape& shape, const std::vector<Matrix>& u, int r);
/// Balanced partition rotated by a Haar unitary drawn from `seed`.
PartitionOfUnity haar_balanced_partition(const AlgebraShape& shape, int r, std::uint64_t seed);

/// Random dense element in the unit ball of the operator norm.
Element random_contraction(const AlgebraShape& shape, std::uint64_t seed);

}  // namespace paving
