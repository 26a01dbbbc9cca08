#pragma once

// Trace-compatible unital inclusions N ⊆ M of multi-matrix algebras and
// their conditional expectations.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paving/algebra.hpp"

namespace paving {

/// N-block k appears lambda[k][l] times inside M-block l.
struct InclusionSpec {
  AlgebraShape n_shape;
  AlgebraShape m_shape;
  std::vector<std::vector<int>> lambda;

  /// Throws SpecError naming the first violated bookkeeping equation:
  /// sum_k lambda[k][l] n_k = m_l, s_k = sum_l lambda[k][l] t_l, no zero row or column.
  void validate() const;

  /// M_k ⊗ 1_d ⊂ M_k ⊗ M_d.
  static InclusionSpec tensor(int k, int d);
  /// C 1 ⊂ M_n.
  static InclusionSpec scalars_in(int n);
  /// M_n ⊂ M_n.
  static InclusionSpec factor(int n);
  /// Parses "tensor(k,d)", "scalars-in(n)" or "factor(n)". Throws SpecError.
  static InclusionSpec from_family(const std::string& text);

  int max_multiplicity() const;
};

class Inclusion {
 public:
  /// Validates `spec`. With `rotate`, each M-block embedding is conjugated by a
  /// Haar unitary drawn from `seed`; otherwise the embedding is the canonical
  /// block-diagonal one.
  static Inclusion build(const InclusionSpec& spec, std::uint64_t seed = 0, bool rotate = false);

  const InclusionSpec& spec() const { return spec_; }
  const AlgebraShape& n_shape() const { return spec_.n_shape; }
  const AlgebraShape& m_shape() const { return spec_.m_shape; }
  bool rotated() const { return rotated_; }
  const std::vector<Matrix>& embed_unitaries() const { return unitaries_; }

  /// Row offset of the first copy of N-block k inside M-block l (canonical coordinates).
  int offset(std::size_t k, std::size_t l) const { return offsets_[k][l]; }
  int multiplicity(std::size_t k, std::size_t l) const { return spec_.lambda[k][l]; }

  /// Unital trace-preserving *-homomorphism N -> M.
  Element embed(const Element& y) const;
  Projection embed_projection(const Projection& p) const;
  PartitionOfUnity embed_partition(const PartitionOfUnity& p) const;
  /// Embedded frame of a single N-frame: columns kron(f, e_c) per copy, rotated.
  Matrix embed_frame(const Matrix& f, std::size_t k, std::size_t l) const;

  /// E_N(x) expressed in N's own coordinates.
  Element cond_exp_n_coords(const Element& x) const;
  /// E_N(x) as an element of M.
  Element cond_exp_n(const Element& x) const { return embed(cond_exp_n_coords(x)); }
  /// E_{N'∩M}(x).
  Element cond_exp_comm(const Element& x) const;

  /// tau-orthonormal basis of N'∩M built from the matrix units 1_{n_k} ⊗ e_cc'.
  std::vector<Element> commutant_basis() const;
  long commutant_dim() const;

  /// [M:N] when M and N are both factors: lambda^2. Otherwise empty.
  std::optional<double> exact_index() const;

  /// Matrix units of M-block l in M coordinates (rotated when the inclusion is).
  Element m_matrix_unit(std::size_t l, int i, int j) const;
  /// Embedded matrix unit e_ij of N-block k.
  Element n_matrix_unit(std::size_t k, int i, int j) const;

  /// U_l* x U_l and its inverse: M-block l in the coordinates where N sits
  /// block-diagonally as x_k ⊗ 1.
  Matrix to_canonical(const Matrix& x, std::size_t l) const;
  Matrix from_canonical(const Matrix& x, std::size_t l) const;

 private:
  InclusionSpec spec_;
  bool rotated_ = false;
  std::vector<Matrix> unitaries_;
  std::vector<std::vector<int>> offsets_;
};

/// tau-orthonormal basis of {x : [x, g] = 0 for every N matrix unit g}, from
/// the null space of the stacked commutator system (singular values below
/// `tol` are zero). Dense and cubic in sum_l m_l^2; throws ResourceError
/// when that exceeds `max_linear_dim`.
std::vector<Element> commutant_null_space(const Inclusion& inc, double tol = 1e-9, long max_linear_dim = 400);

/// The Jones projection e with E_N(e) = [M:N]^{-1} 1, when it is realizable as
/// 1_{k/d} ⊗ (1/d) sum_ij e_ij ⊗ e_ij in M_k ⊗ M_d (tensor inclusions with d | k).
std::optional<Element> jones_projection(const Inclusion& inc);

}  // namespace paving
