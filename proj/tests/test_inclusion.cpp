#include "doctest.h"
#include "corpus.hpp"
#include "oracles.hpp"
#include "paving/inclusion.hpp"

using namespace paving;

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Element m_elem(const Inclusion& inc, const Matrix& m) { return Element(inc.m_shape(), {m}); }

}  // namespace

TEST_CASE("spec validation names the violated equation") {
  InclusionSpec bad{AlgebraShape::full_matrix(2), AlgebraShape::full_matrix(5), {{2}}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("m_0"), SpecError);
  InclusionSpec weights{AlgebraShape({1, 1}, {0.5, 0.5}), AlgebraShape::full_matrix(3), {{1}, {2}}};
  CHECK_THROWS_WITH_AS(weights.validate(), doctest::Contains("s_0"), SpecError);
  InclusionSpec zero_row{AlgebraShape({1, 1}, {0.5, 0.5}), AlgebraShape::full_matrix(1), {{1}, {0}}};
  CHECK_THROWS_AS(zero_row.validate(), SpecError);
  CHECK_THROWS_AS(InclusionSpec::from_family("tensor(2)"), SpecError);
  CHECK_THROWS_AS(InclusionSpec::from_family("bogus(3)"), SpecError);
  CHECK(InclusionSpec::from_family("tensor(2,3)").m_shape.dim(0) == 6);
  CHECK(InclusionSpec::from_family("scalars-in(4)").m_shape.dim(0) == 4);
  for (const auto& c : corpus::all()) CHECK_NOTHROW(c.spec.validate());
}

TEST_CASE("N = M = M2: E_N is the identity and N'∩M is the scalars") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(2));
  const Element x = oracle::gaussian(inc.m_shape(), 1);
  CHECK(oracle::max_abs(inc.cond_exp_n(x) - x) < 1e-14);
  CHECK(inc.commutant_dim() == 1);
  CHECK(oracle::max_abs(inc.cond_exp_comm(x) - Element::scalar(inc.m_shape(), trace(x))) < 1e-14);
}

TEST_CASE("C ⊂ M_n: E_N is the trace and E_comm the identity") {
  for (int n = 2; n <= 4; ++n) {
    const Inclusion inc = Inclusion::build(InclusionSpec::scalars_in(n));
    const Element x = oracle::gaussian(inc.m_shape(), n);
    CHECK(oracle::max_abs(inc.cond_exp_n(x) - Element::scalar(inc.m_shape(), trace(x))) < 1e-14);
    CHECK(oracle::max_abs(inc.cond_exp_comm(x) - x) < 1e-14);
    CHECK(inc.commutant_dim() == n * n);
    // Tower: E_comm after E_N is the trace.
    CHECK(oracle::max_abs(inc.cond_exp_comm(inc.cond_exp_n(x)) - Element::scalar(inc.m_shape(), trace(x))) < 1e-14);
  }
}

TEST_CASE("M_2 ⊗ 1 ⊂ M_2 ⊗ M_d against partial traces") {
  for (int d = 2; d <= 3; ++d) {
    const Inclusion inc = Inclusion::build(InclusionSpec::tensor(2, d));
    CHECK(inc.commutant_dim() == d * d);
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng rng(s);
      const Matrix a = rng.ginibre(2, 2), b = rng.ginibre(d, d);
      const Element x = m_elem(inc, kron(a, b));
      const complex tb = b.trace() / static_cast<double>(d), ta = a.trace() / 2.0;
      CHECK(oracle::max_abs(inc.cond_exp_n(x) - m_elem(inc, kron(tb * a, Matrix::Identity(d, d)))) < 1e-12);
      CHECK(oracle::max_abs(inc.cond_exp_comm(x) - m_elem(inc, kron(Matrix::Identity(2, 2), ta * b))) < 1e-12);
    }
  }
}

TEST_CASE("closed forms agree with trace-orthogonal projections on the corpus") {
  for (const auto& c : corpus::all()) {
    CAPTURE(c.name);
    for (bool rotate : {false, true}) {
      const Inclusion inc = Inclusion::build(c.spec, 17, rotate);
      CHECK(static_cast<long>(oracle::commutant_by_null_space(inc).size()) == inc.commutant_dim());
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Element x = oracle::gaussian(inc.m_shape(), s);
        CHECK(oracle::max_abs(inc.cond_exp_n(x) - oracle::cond_exp_n(inc, x)) < 1e-10);
        CHECK(oracle::max_abs(inc.cond_exp_comm(x) - oracle::cond_exp_comm(inc, x)) < 1e-10);
      }
    }
  }
}

TEST_CASE("library null-space commutant spans the structural one") {
  for (const auto& c : corpus::all()) {
    CAPTURE(c.name);
    const Inclusion inc = Inclusion::build(c.spec, 3, true);
    const auto ns = commutant_null_space(inc);
    const auto structural = inc.commutant_basis();
    CHECK(ns.size() == structural.size());
    for (const Element& y : structural) CHECK(oracle::max_abs(oracle::project(ns, y) - y) < 1e-9);
    for (std::size_t i = 0; i < structural.size(); ++i)
      for (std::size_t j = 0; j < structural.size(); ++j)
        CHECK(std::abs(oracle::inner(structural[i], structural[j]) - (i == j ? 1.0 : 0.0)) < 1e-10);
  }
}

TEST_CASE("property: embed is a unital trace-preserving *-homomorphism") {
  for (const auto& c : corpus::all()) {
    CAPTURE(c.name);
    const Inclusion inc = Inclusion::build(c.spec, 5, true);
    CHECK(oracle::max_abs(inc.embed(Element::identity(inc.n_shape())) - Element::identity(inc.m_shape())) < 1e-12);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Element x = oracle::gaussian(inc.n_shape(), s), y = oracle::gaussian(inc.n_shape(), s + 30);
      CHECK(std::abs(trace(inc.embed(x)) - trace(x)) < 1e-12);
      CHECK(oracle::max_abs(inc.embed(x) * inc.embed(y) - inc.embed(x * y)) < 1e-11);
      CHECK(oracle::max_abs(inc.embed(x.adjoint()) - inc.embed(x).adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("property: E_N and E_comm are idempotent, unital, positive, trace-preserving, bimodular") {
  for (const auto& c : corpus::all()) {
    CAPTURE(c.name);
    const Inclusion inc = Inclusion::build(c.spec, 9, true);
    const Element one = Element::identity(inc.m_shape());
    CHECK(oracle::max_abs(inc.cond_exp_n(one) - one) < 1e-12);
    CHECK(oracle::max_abs(inc.cond_exp_comm(one) - one) < 1e-12);
    const auto comm = inc.commutant_basis();
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Element x = oracle::gaussian(inc.m_shape(), 100 + s);
      const Element en = inc.cond_exp_n(x), ec = inc.cond_exp_comm(x);
      CHECK(oracle::max_abs(inc.cond_exp_n(en) - en) < 1e-12);
      CHECK(oracle::max_abs(inc.cond_exp_comm(ec) - ec) < 1e-12);
      CHECK(std::abs(trace(en) - trace(x)) < 1e-12);
      CHECK(std::abs(trace(ec) - trace(x)) < 1e-12);
      const Element xn = inc.embed(oracle::gaussian(inc.n_shape(), 200 + s));
      CHECK(oracle::max_abs(inc.cond_exp_n(xn) - xn) < 1e-12);

      const Element a = inc.embed(oracle::gaussian(inc.n_shape(), 300 + s));
      const Element b = inc.embed(oracle::gaussian(inc.n_shape(), 400 + s));
      CHECK(oracle::max_abs(inc.cond_exp_n(a * x * b) - a * en * b) < 1e-9);
      // E_comm commutes with N and is N'∩M-bimodular.
      CHECK(oracle::max_abs(ec * a - a * ec) < 1e-9);
      const Element y = comm[s % comm.size()];
      CHECK(oracle::max_abs(inc.cond_exp_comm(y * x) - y * ec) < 1e-9);

      const Element p = random_element(inc.m_shape(), RandomKind::positive_contraction, s);
      CHECK(min_eigenvalue(inc.cond_exp_n(p)) >= -1e-10);
      CHECK(min_eigenvalue(inc.cond_exp_comm(p)) >= -1e-10);
    }
  }
}

TEST_CASE("exact index") {
  CHECK(*Inclusion::build(InclusionSpec::scalars_in(3)).exact_index() == doctest::Approx(9.0));
  CHECK(*Inclusion::build(InclusionSpec::tensor(2, 3)).exact_index() == doctest::Approx(9.0));
  CHECK(*Inclusion::build(InclusionSpec::factor(5)).exact_index() == doctest::Approx(1.0));
  CHECK_FALSE(Inclusion::build(corpus::m2_into_two_blocks()).exact_index().has_value());
}

TEST_CASE("Jones projection for tensor inclusions") {
  for (auto [k, d] : {std::pair{2, 2}, std::pair{4, 2}, std::pair{3, 3}}) {
    const Inclusion inc = Inclusion::build(InclusionSpec::tensor(k, d));
    const auto e = jones_projection(inc);
    REQUIRE(e.has_value());
    CHECK(oracle::max_abs(*e * *e - *e) < 1e-12);
    CHECK(oracle::max_abs(*e - e->adjoint()) < 1e-12);
    CHECK(oracle::max_abs(inc.cond_exp_n(*e) - Element::scalar(inc.m_shape(), 1.0 / (d * d))) < 1e-12);
  }
  CHECK_FALSE(jones_projection(Inclusion::build(InclusionSpec::tensor(3, 2))).has_value());
  CHECK_FALSE(jones_projection(Inclusion::build(InclusionSpec::scalars_in(3))).has_value());
}
