#include <cmath>

#include "doctest.h"
#include "corpus.hpp"
#include "oracles.hpp"
#include "paving/basis.hpp"

using namespace paving;

TEST_CASE("N = M: the basis is {1} and d_ob is 1") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(3));
  const OrthonormalBasis b = orthonormal_basis(inc);
  REQUIRE(b.elements.size() == 1);
  CHECK(oracle::max_abs(b.elements[0] - Element::identity(inc.m_shape())) < 1e-12);
  const DobReport r = d_ob(inc);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.lower == doctest::Approx(1.0));
  CHECK(r.upper == doctest::Approx(1.0));
}

TEST_CASE("C ⊂ M_n against the explicit matrix-unit basis") {
  for (int n = 2; n <= 4; ++n) {
    const Inclusion inc = Inclusion::build(InclusionSpec::scalars_in(n));
    const AlgebraShape& ms = inc.m_shape();
    // Oracle basis sqrt(n) e_ij: sum_j m_j* m_j = n * n * 1.
    Element oracle_sum = Element::zero(ms);
    std::vector<Element> units;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Matrix e = Matrix::Zero(n, n);
        e(i, j) = std::sqrt(static_cast<double>(n));
        units.emplace_back(ms, std::vector<Matrix>{e});
        oracle_sum += units.back().adjoint() * units.back();
      }
    const double oracle_value = op_norm(oracle_sum);
    CHECK(oracle_value == doctest::Approx(n * n));

    const OrthonormalBasis b = orthonormal_basis(inc);
    CHECK(b.elements.size() == static_cast<std::size_t>(n * n));
    const DobReport r = d_ob(inc);
    CHECK(std::abs(r.value - oracle_value) < 1e-8);
    CHECK(r.lower == doctest::Approx(n * n));
    CHECK(r.upper == doctest::Approx(1 + n * n * (n * n - 1)));
    CHECK(r.all_but_one_full);
    CHECK(r.lambda_sum_residual < 1e-8);
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(expansion_residual(inc, b, oracle::gaussian(ms, s)) < 1e-8);
  }
}

TEST_CASE("scalars-in(3) reports 9 inside [9, 73]") {
  const DobReport r = d_ob(Inclusion::build(InclusionSpec::scalars_in(3)));
  CHECK(std::abs(r.value - 9.0) < 1e-8);
  CHECK(r.lower == doctest::Approx(9.0));
  CHECK(r.upper == doctest::Approx(73.0));
}

TEST_CASE("M2 ⊗ 1 ⊂ M2 ⊗ M2 lands in [4, 13]") {
  const DobReport r = d_ob(Inclusion::build(InclusionSpec::tensor(2, 2)));
  CHECK(r.value >= 4.0 - 1e-8);
  CHECK(r.value <= 13.0 + 1e-8);
}

TEST_CASE("property: orthonormality and expansion on the corpus") {
  for (const auto& c : corpus::all()) {
    CAPTURE(c.name);
    const Inclusion inc = Inclusion::build(c.spec, 21, true);
    const OrthonormalBasis b = orthonormal_basis(inc);
    CHECK(oracle::max_abs(b.elements[0] - Element::identity(inc.m_shape())) < 1e-12);
    CHECK(orthonormality_residual(inc, b) < 1e-8);
    for (const Element& g : b.gram) {
      CHECK(oracle::max_abs(g * g - g) < 1e-8);
      CHECK(oracle::max_abs(g - g.adjoint()) < 1e-8);
    }
    for (std::uint64_t s = 0; s < 10; ++s) CHECK(expansion_residual(inc, b, oracle::gaussian(inc.m_shape(), s)) < 1e-8);
    const auto exact = inc.exact_index();
    if (exact) {
      const DobReport r = d_ob(inc, b, *exact, true);
      CHECK(r.lambda_sum_residual < 1e-8);
      if (r.all_but_one_full) {
        CHECK(r.value >= r.lower - 1e-8);
        CHECK(r.value <= r.upper + 1e-8);
      }
    }
  }
}

TEST_CASE("basic construction for C ⊂ M2") {
  const Inclusion inc = Inclusion::build(InclusionSpec::scalars_in(2));
  const BasicConstruction bc = basic_construction(inc, 3);
  CHECK(bc.l2_dim == 4);
  CHECK(bc.index_exact);
  CHECK(bc.lambda == doctest::Approx(0.25));
  CHECK(std::abs(bc.tau1_e - 0.25) < 1e-8);
  // e_N projects onto the line through ξ(1).
  const Eigen::VectorXcd xi = l2_vector(inc.m_shape(), Element::identity(inc.m_shape()));
  CHECK((bc.e_n - xi * xi.adjoint()).norm() < 1e-12);
  CHECK(bc.jones_residual < 1e-9);
  CHECK(bc.commute_residual < 1e-9);
  CHECK(bc.trace_identity_residual < 1e-9);
}

TEST_CASE("basic construction: N = M gives e_N = 1") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(3));
  const BasicConstruction bc = basic_construction(inc, 1);
  CHECK((bc.e_n - Matrix::Identity(9, 9)).norm() < 1e-12);
}

TEST_CASE("property: basic construction identities on the corpus") {
  for (const auto& c : corpus::all()) {
    CAPTURE(c.name);
    const Inclusion inc = Inclusion::build(c.spec, 2, true);
    const BasicConstruction bc = basic_construction(inc, 5, 10);
    CHECK((bc.e_n * bc.e_n - bc.e_n).norm() < 1e-10);
    CHECK(bc.jones_residual < 1e-9);
    CHECK(bc.commute_residual < 1e-9);
    // L^2(M) inner product is the trace.
    const Element a = oracle::gaussian(inc.m_shape(), 1), b = oracle::gaussian(inc.m_shape(), 2);
    CHECK(std::abs(l2_vector(inc.m_shape(), a).dot(l2_vector(inc.m_shape(), b)) - oracle::inner(a, b)) < 1e-12);
    // Left multiplication is a representation.
    CHECK((left_multiplication(a * b) - left_multiplication(a) * left_multiplication(b)).norm() < 1e-10);
    if (bc.index_exact) {
      CHECK(std::abs(bc.tau1_e - bc.lambda) < 1e-8);
      CHECK(bc.trace_identity_residual < 1e-8);
    }
  }
}

TEST_CASE("Jones projection trace on product inclusions") {
  for (auto [k, d] : {std::pair{2, 2}, std::pair{4, 2}, std::pair{3, 3}}) {
    const Inclusion inc = Inclusion::build(InclusionSpec::tensor(k, d));
    const auto e = jones_projection(inc);
    REQUIRE(e.has_value());
    CHECK(std::abs(trace(*e).real() - 1.0 / (d * d)) < 1e-8);
  }
}

TEST_CASE("basic construction respects its budget") {
  CHECK_THROWS_AS(basic_construction(Inclusion::build(InclusionSpec::scalars_in(70)), 1), ResourceError);
}
