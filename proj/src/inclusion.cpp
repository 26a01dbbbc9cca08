#include "paving/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

namespace paving {

// --------------------------------------------------------------- InclusionSpec

void InclusionSpec::validate() const {
  const std::size_t nk = n_shape.num_blocks();
  const std::size_t nl = m_shape.num_blocks();
  if (nk == 0 || nl == 0) throw SpecError("inclusion spec: empty algebra");
  if (lambda.size() != nk) throw SpecError("inclusion spec: lambda needs one row per N block");
  for (const auto& row : lambda) {
    if (row.size() != nl) throw SpecError("inclusion spec: lambda needs one column per M block");
    for (int v : row)
      if (v < 0) throw SpecError("inclusion spec: lambda has a negative entry");
  }
  for (std::size_t k = 0; k < nk; ++k) {
    if (std::all_of(lambda[k].begin(), lambda[k].end(), [](int v) { return v == 0; }))
      throw SpecError("inclusion spec: lambda row " + std::to_string(k) + " is zero");
  }
  for (std::size_t l = 0; l < nl; ++l) {
    int dim = 0;
    bool any = false;
    for (std::size_t k = 0; k < nk; ++k) {
      dim += lambda[k][l] * n_shape.dim(k);
      any = any || lambda[k][l] > 0;
    }
    if (!any) throw SpecError("inclusion spec: lambda column " + std::to_string(l) + " is zero");
    if (dim != m_shape.dim(l)) {
      std::ostringstream os;
      os << "inclusion spec: M block " << l << ": sum_k lambda[k][" << l << "] n_k = " << dim << " but m_" << l
         << " = " << m_shape.dim(l);
      throw SpecError(os.str());
    }
  }
  for (std::size_t k = 0; k < nk; ++k) {
    double s = 0.0;
    for (std::size_t l = 0; l < nl; ++l) s += lambda[k][l] * m_shape.weight(l);
    if (std::abs(s - n_shape.weight(k)) > 1e-9 * std::max(1.0, n_shape.weight(k))) {
      std::ostringstream os;
      os.precision(12);
      os << "inclusion is not trace preserving: s_" << k << " = " << n_shape.weight(k) << " but sum_l lambda[" << k
         << "][l] t_l = " << s;
      throw SpecError(os.str());
    }
  }
}

InclusionSpec InclusionSpec::tensor(int k, int d) {
  if (k < 1 || d < 1) throw SpecError("tensor(k,d) needs k, d >= 1");
  return InclusionSpec{AlgebraShape::full_matrix(k), AlgebraShape::full_matrix(k * d), {{d}}};
}

InclusionSpec InclusionSpec::scalars_in(int n) {
  if (n < 1) throw SpecError("scalars-in(n) needs n >= 1");
  return InclusionSpec{AlgebraShape::full_matrix(1), AlgebraShape::full_matrix(n), {{n}}};
}

InclusionSpec InclusionSpec::factor(int n) {
  if (n < 1) throw SpecError("factor(n) needs n >= 1");
  return InclusionSpec{AlgebraShape::full_matrix(n), AlgebraShape::full_matrix(n), {{1}}};
}

InclusionSpec InclusionSpec::from_family(const std::string& text) {
  static const std::regex two(R"(\s*tensor\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
  static const std::regex one(R"(\s*(scalars-in|factor)\s*\(\s*(\d+)\s*\)\s*)");
  std::smatch m;
  try {
    if (std::regex_match(text, m, two)) return tensor(std::stoi(m[1]), std::stoi(m[2]));
    if (std::regex_match(text, m, one)) {
      const int n = std::stoi(m[2]);
      return m[1] == "factor" ? factor(n) : scalars_in(n);
    }
  } catch (const std::out_of_range&) {
    throw SpecError("family parameter out of range: " + text);
  }
  throw SpecError("unknown inclusion family '" + text + "' (expected tensor(k,d), scalars-in(n) or factor(n))");
}

int InclusionSpec::max_multiplicity() const {
  int m = 0;
  for (const auto& row : lambda)
    for (int v : row) m = std::max(m, v);
  return m;
}

// ------------------------------------------------------------------ Inclusion

Inclusion Inclusion::build(const InclusionSpec& spec, std::uint64_t seed, bool rotate) {
  spec.validate();
  Inclusion inc;
  inc.spec_ = spec;
  inc.rotated_ = rotate;
  const std::size_t nk = spec.n_shape.num_blocks();
  const std::size_t nl = spec.m_shape.num_blocks();
  inc.offsets_.assign(nk, std::vector<int>(nl, 0));
  for (std::size_t l = 0; l < nl; ++l) {
    int at = 0;
    for (std::size_t k = 0; k < nk; ++k) {
      inc.offsets_[k][l] = at;
      at += spec.lambda[k][l] * spec.n_shape.dim(k);
    }
  }
  if (rotate) {
    inc.unitaries_ = random_haar_unitary(spec.m_shape, derive_seed(seed, "embed", 0)).blocks();
  } else {
    for (int d : spec.m_shape.block_dims()) inc.unitaries_.push_back(Matrix::Identity(d, d));
  }
  return inc;
}

Matrix Inclusion::to_canonical(const Matrix& x, std::size_t l) const {
  if (!rotated_) return x;
  return unitaries_[l].adjoint() * x * unitaries_[l];
}

Matrix Inclusion::from_canonical(const Matrix& x, std::size_t l) const {
  if (!rotated_) return x;
  return unitaries_[l] * x * unitaries_[l].adjoint();
}

Element Inclusion::embed(const Element& y) const {
  if (!(y.shape() == n_shape())) throw MalformedElementError("embed: element is not in N");
  std::vector<Matrix> out;
  for (std::size_t l = 0; l < m_shape().num_blocks(); ++l) {
    Matrix b = Matrix::Zero(m_shape().dim(l), m_shape().dim(l));
    for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) {
      const int mult = spec_.lambda[k][l];
      const int nk = n_shape().dim(k);
      const int off = offsets_[k][l];
      for (int a = 0; a < nk; ++a)
        for (int c = 0; c < mult; ++c)
          for (int bb = 0; bb < nk; ++bb) b(off + a * mult + c, off + bb * mult + c) = y.block(k)(a, bb);
    }
    out.push_back(from_canonical(b, l));
  }
  return Element(m_shape(), std::move(out));
}

Matrix Inclusion::embed_frame(const Matrix& f, std::size_t k, std::size_t l) const {
  const int mult = spec_.lambda[k][l];
  const int off = offsets_[k][l];
  Matrix out = Matrix::Zero(m_shape().dim(l), f.cols() * mult);
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (int c = 0; c < mult; ++c)
      for (Eigen::Index a = 0; a < f.rows(); ++a) out(off + a * mult + c, j * mult + c) = f(a, j);
  if (rotated_) out = unitaries_[l] * out;
  return out;
}

Projection Inclusion::embed_projection(const Projection& p) const {
  if (!(p.shape() == n_shape())) throw MalformedElementError("embed_projection: projection is not in N");
  std::vector<Matrix> frame;
  for (std::size_t l = 0; l < m_shape().num_blocks(); ++l) {
    Eigen::Index cols = 0;
    std::vector<Matrix> pieces;
    for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) {
      if (spec_.lambda[k][l] == 0) continue;
      pieces.push_back(embed_frame(p.frame(k), k, l));
      cols += pieces.back().cols();
    }
    Matrix f(m_shape().dim(l), cols);
    Eigen::Index at = 0;
    for (const auto& piece : pieces) {
      f.middleCols(at, piece.cols()) = piece;
      at += piece.cols();
    }
    frame.push_back(std::move(f));
  }
  return Projection::from_frame(m_shape(), std::move(frame));
}

PartitionOfUnity Inclusion::embed_partition(const PartitionOfUnity& p) const {
  std::vector<Projection> parts;
  parts.reserve(p.size());
  for (const auto& q : p.parts()) parts.push_back(embed_projection(q));
  return PartitionOfUnity(std::move(parts));
}

Element Inclusion::cond_exp_n_coords(const Element& x) const {
  if (!(x.shape() == m_shape())) throw MalformedElementError("E_N: element is not in M");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) out.push_back(Matrix::Zero(n_shape().dim(k), n_shape().dim(k)));
  for (std::size_t l = 0; l < m_shape().num_blocks(); ++l) {
    const Matrix xc = to_canonical(x.block(l), l);
    const double tl = m_shape().weight(l);
    for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) {
      const int mult = spec_.lambda[k][l];
      if (mult == 0) continue;
      const int nk = n_shape().dim(k);
      const int off = offsets_[k][l];
      for (int b = 0; b < nk; ++b)
        for (int a = 0; a < nk; ++a) {
          complex s = 0.0;
          for (int c = 0; c < mult; ++c) s += xc(off + a * mult + c, off + b * mult + c);
          out[k](a, b) += tl * s;
        }
    }
  }
  for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) out[k] /= n_shape().weight(k);
  return Element(n_shape(), std::move(out));
}

Element Inclusion::cond_exp_comm(const Element& x) const {
  if (!(x.shape() == m_shape())) throw MalformedElementError("E_{N'∩M}: element is not in M");
  std::vector<Matrix> out;
  for (std::size_t l = 0; l < m_shape().num_blocks(); ++l) {
    const Matrix xc = to_canonical(x.block(l), l);
    Matrix y = Matrix::Zero(xc.rows(), xc.cols());
    for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) {
      const int mult = spec_.lambda[k][l];
      if (mult == 0) continue;
      const int nk = n_shape().dim(k);
      const int off = offsets_[k][l];
      Matrix z = Matrix::Zero(mult, mult);
      for (int a = 0; a < nk; ++a) z += xc.block(off + a * mult, off + a * mult, mult, mult);
      z /= static_cast<double>(nk);
      for (int a = 0; a < nk; ++a) y.block(off + a * mult, off + a * mult, mult, mult) = z;
    }
    out.push_back(from_canonical(y, l));
  }
  return Element(m_shape(), std::move(out));
}

long Inclusion::commutant_dim() const {
  long d = 0;
  for (const auto& row : spec_.lambda)
    for (int v : row) d += static_cast<long>(v) * v;
  return d;
}

std::vector<Element> Inclusion::commutant_basis() const {
  std::vector<Element> basis;
  for (std::size_t l = 0; l < m_shape().num_blocks(); ++l) {
    for (std::size_t k = 0; k < n_shape().num_blocks(); ++k) {
      const int mult = spec_.lambda[k][l];
      const int nk = n_shape().dim(k);
      const int off = offsets_[k][l];
      const double scale = 1.0 / std::sqrt(m_shape().weight(l) * nk);
      for (int c = 0; c < mult; ++c)
        for (int cc = 0; cc < mult; ++cc) {
          Element e = Element::zero(m_shape());
          std::vector<Matrix> blocks = e.blocks();
          for (int a = 0; a < nk; ++a) blocks[l](off + a * mult + c, off + a * mult + cc) = scale;
          blocks[l] = from_canonical(blocks[l], l);
          basis.emplace_back(m_shape(), std::move(blocks));
        }
    }
  }
  return basis;
}

std::optional<double> Inclusion::exact_index() const {
  if (n_shape().num_blocks() == 1 && m_shape().num_blocks() == 1) {
    const double lam = spec_.lambda[0][0];
    return lam * lam;
  }
  return std::nullopt;
}

Element Inclusion::m_matrix_unit(std::size_t l, int i, int j) const {
  std::vector<Matrix> blocks;
  for (int d : m_shape().block_dims()) blocks.push_back(Matrix::Zero(d, d));
  blocks[l](i, j) = 1.0;
  blocks[l] = from_canonical(blocks[l], l);
  return Element(m_shape(), std::move(blocks));
}

Element Inclusion::n_matrix_unit(std::size_t k, int i, int j) const {
  std::vector<Matrix> blocks;
  for (int d : n_shape().block_dims()) blocks.push_back(Matrix::Zero(d, d));
  blocks[k](i, j) = 1.0;
  return embed(Element(n_shape(), std::move(blocks)));
}

// ------------------------------------------------------------------ oracles

std::vector<Element> commutant_null_space(const Inclusion& inc, double tol, long max_linear_dim) {
  const AlgebraShape& ms = inc.m_shape();
  const long unknowns = ms.linear_dim();
  if (unknowns > max_linear_dim)
    throw ResourceError("commutant null space: linear dimension " + std::to_string(unknowns) + " exceeds " +
                        std::to_string(max_linear_dim));
  // Unknown vector: the entries of every M block, column-major, concatenated.
  std::vector<long> start(ms.num_blocks(), 0);
  for (std::size_t l = 1; l < ms.num_blocks(); ++l) start[l] = start[l - 1] + static_cast<long>(ms.dim(l - 1)) * ms.dim(l - 1);

  std::vector<Element> gens;
  for (std::size_t k = 0; k < inc.n_shape().num_blocks(); ++k)
    for (int i = 0; i < inc.n_shape().dim(k); ++i)
      for (int j = 0; j < inc.n_shape().dim(k); ++j) gens.push_back(inc.n_matrix_unit(k, i, j));

  Matrix system = Matrix::Zero(static_cast<Eigen::Index>(gens.size()) * unknowns, unknowns);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
      const int d = ms.dim(l);
      const Matrix& gl = gens[g].block(l);
      // vec(X G - G X) = (G^T ⊗ I - I ⊗ G) vec(X)
      for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row) {
          const long unknown = start[l] + static_cast<long>(col) * d + row;
          for (int r = 0; r < d; ++r) {
            // (X G)(row, r) gets X(row, col) G(col, r)
            system(static_cast<Eigen::Index>(g) * unknowns + start[l] + static_cast<long>(r) * d + row, unknown) += gl(col, r);
            // (G X)(r, col) gets G(r, row) X(row, col)
            system(static_cast<Eigen::Index>(g) * unknowns + start[l] + static_cast<long>(col) * d + r, unknown) -= gl(r, row);
          }
        }
    }
  }
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  std::vector<Element> basis;
  for (long c = 0; c < unknowns; ++c) {
    const bool null = c >= sv.size() || sv(c) <= tol * scale;
    if (!null) continue;
    const auto v = svd.matrixV().col(c);
    std::vector<Matrix> blocks;
    for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
      const int d = ms.dim(l);
      Matrix b(d, d);
      for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row) b(row, col) = v(start[l] + static_cast<long>(col) * d + row);
      blocks.push_back(std::move(b));
    }
    Element e(ms, std::move(blocks));
    // V's columns are Euclidean-orthonormal; rescale each block to the trace inner product.
    basis.push_back(std::move(e));
  }
  // Re-orthonormalize in the trace inner product.
  std::vector<Element> out;
  for (auto& e : basis) {
    for (const auto& f : out) e -= f * trace(f.adjoint() * e);
    const double n = l2_norm(e);
    if (n > 1e-12) out.push_back(e * complex(1.0 / n));
  }
  return out;
}

std::optional<Element> jones_projection(const Inclusion& inc) {
  if (inc.n_shape().num_blocks() != 1 || inc.m_shape().num_blocks() != 1) return std::nullopt;
  const int d = inc.spec().lambda[0][0];
  const int k = inc.n_shape().dim(0);
  if (k % d != 0) return std::nullopt;
  // Canonical coordinates: row a*d + c for a in [0,k), c in [0,d).
  // Write a = a1*d + a2; e = 1_{k/d} ⊗ (1/d) sum_{a2,b2} e_{a2 b2} ⊗ e_{a2 b2}.
  const int dim = k * d;
  Matrix e = Matrix::Zero(dim, dim);
  for (int a1 = 0; a1 < k / d; ++a1)
    for (int a2 = 0; a2 < d; ++a2)
      for (int b2 = 0; b2 < d; ++b2) {
        const int row = (a1 * d + a2) * d + a2;
        const int col = (a1 * d + b2) * d + b2;
        e(row, col) = 1.0 / d;
      }
  if (inc.rotated()) e = inc.embed_unitaries()[0] * e * inc.embed_unitaries()[0].adjoint();
  return Element(inc.m_shape(), {e});
}

}  // namespace paving
