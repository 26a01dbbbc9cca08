#pragma once

// Orthonormal bases of M over N and the basic construction <M, e_N>.

#include <optional>
#include <string>
#include <vector>

#include "paving/inclusion.hpp"

namespace paving {

struct OrthonormalBasis {
  std::vector<Element> elements;       // m_1 = 1, then the rest
  std::vector<Element> gram;           // E_N(m_j* m_j) in N coordinates, each a projection
  int dropped = 0;                     // candidates discarded as dependent
  std::vector<std::string> log;        // one line per dropped candidate
};

/// Gram-Schmidt under the N-valued inner product E_N(x* y), started at m_1 = 1
/// and run over 1, the matrix units of N'∩M, then the matrix units of M.
/// A candidate whose residual has ||E_N(y* y)|| < 1e-8 is dropped.
OrthonormalBasis orthonormal_basis(const Inclusion& inc);

/// max over blocks of ||x - sum_j m_j E_N(m_j* x)||_F.
double expansion_residual(const Inclusion& inc, const OrthonormalBasis& basis, const Element& x);
/// max_{i,j} ||E_N(m_i* m_j) - delta_ij gram_j||_F.
double orthonormality_residual(const Inclusion& inc, const OrthonormalBasis& basis);

struct DobReport {
  double value = 0.0;   // ||sum_j m_j* m_j||
  double index = 1.0;
  bool index_exact = false;
  double lower = 1.0;   // index
  double upper = 1.0;   // 1 + index (ceil(index) - 1)
  bool all_but_one_full = false;  // E_N(m_j* m_j) = 1 for all but at most one j
  std::size_t basis_size = 0;
  double lambda_sum_residual = 0.0;  // ||lambda sum_j m_j m_j* - 1||, lambda = 1/index
};

/// d_ob of the constructed basis with the interval it must fall in.
DobReport d_ob(const Inclusion& inc, const OrthonormalBasis& basis, double index, bool index_exact);
DobReport d_ob(const Inclusion& inc);

/// <M, e_N> acting on L^2(M, tau) = ⊕_l C^{m_l} ⊗ C^{m_l}.
struct BasicConstruction {
  long l2_dim = 0;
  Matrix e_n;  // Jones projection onto L^2(N)
  double lambda = 1.0;
  bool index_exact = false;
  double jones_residual = 0.0;        // max ||e x e - E_N(x) e|| over samples
  double commute_residual = 0.0;      // max ||e y - y e|| over samples y in N
  double trace_identity_residual = 0.0;  // max |tau_1(e x) - lambda tau(x)| over samples
  double tau1_e = 0.0;                // tau_1(e_N)
};

/// ξ(y) = ⊕_l sqrt(t_l) vec(y_l), so <ξ(a), ξ(b)> = tau(a* b).
Eigen::VectorXcd l2_vector(const AlgebraShape& shape, const Element& y);
/// Left multiplication by x on L^2(M).
Matrix left_multiplication(const Element& x);

/// Builds e_N and checks its defining identities on `samples` random
/// elements. Throws ResourceError when sum_l m_l^2 exceeds `budget`.
BasicConstruction basic_construction(const Inclusion& inc, std::uint64_t seed, int samples = 10, long budget = 4096,
                                     std::optional<double> index_override = std::nullopt);

/// tau_1(T) = lambda sum_j <ξ(m_j), T ξ(m_j)> for an orthonormal basis {m_j}:
/// the trace on <M, e_N> extending tau with tau_1(e_N x) = lambda tau(x).
complex basic_trace(const Inclusion& inc, const OrthonormalBasis& basis, double lambda, const Matrix& t);

}  // namespace paving
