#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "paving/bounds.hpp"
#include "paving/l2.hpp"
#include "paving/scan.hpp"

using namespace paving;

TEST_CASE("l2: n = 1 has ratio 1") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(8));
  const PavingProblem p = make_problem(inc, {oracle::gaussian_hermitian(inc.m_shape(), 1)}, 0.5);
  CHECK(l2_pave(p, 1, 3).max_ratio == doctest::Approx(1.0));
}

TEST_CASE("l2 ratio against a dense computation") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(12));
  const Element x = oracle::gaussian_hermitian(inc.m_shape(), 4);
  const PavingProblem p = make_problem(inc, {x}, 0.5);
  const PavingCertificate c = l2_pave(p, 3, 9);
  const Element ec = Element::scalar(inc.m_shape(), oracle::tau(x));
  Matrix pinched = Matrix::Zero(12, 12);
  for (const auto& q : c.partition.parts()) {
    const Matrix qd = oracle::dense(q.element());
    pinched += qd * oracle::dense(x) * qd;
  }
  const double num = std::sqrt((pinched - oracle::dense(ec)).squaredNorm() / 12);
  const double den = std::sqrt(oracle::dense(x - ec).squaredNorm() / 12);
  CHECK(std::abs(c.ratios[0] - num / den) < 1e-10);
}

TEST_CASE("property: M_256, n = 16, mean ratio near n^{-1/2}") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(256));
  double mean = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 1, s, 0.5}), 0.3);
    const PavingCertificate c = l2_pave(p, 16, s);
    mean += c.max_ratio / 5;
    CHECK(c.verified);
  }
  CHECK(mean >= 0.9 * 0.25);
  CHECK(mean <= 1.1 * 0.25);
}

TEST_CASE("l2_paving_size returns the first n at or below epsilon") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(64));
  const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 1, 2, 0.5}), 0.3);
  const L2SizeEstimate e = l2_paving_size(p, 5, 64);
  REQUIRE(e.n > 0);
  CHECK(e.max_ratio.size() == static_cast<std::size_t>(e.n));
  CHECK(e.max_ratio.back() <= 0.3);
  for (std::size_t i = 0; i + 1 < e.max_ratio.size(); ++i) CHECK(e.max_ratio[i] > 0.3);
}

TEST_CASE("scan: empty grid and epsilon >= 1") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(4, 2));
  const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 1, 1, 0.5}), 0.5);
  CHECK_THROWS_AS(scan(p, ScanConfig{}), PreconditionError);
  ScanConfig cfg;
  cfg.grid = {1.5};
  const auto rows = scan(p, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].r_found == 1);
  CHECK(rows[0].r_verified);
  CHECK(rows[0].lower_bound == 1);
}

TEST_CASE("property: scan rows stay between the bounds") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(8, 2));
  const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 1, 3, 0.5}), 0.5);
  ScanConfig cfg;
  cfg.grid = {0.9, 0.7, 0.5};
  cfg.steps = 600;
  cfg.seed = 4;
  const auto rows = scan(p, cfg);
  REQUIRE(rows.size() == 3);
  for (const ScanRow& row : rows) {
    CAPTURE(row.epsilon);
    CHECK(row.theorem_r == theorem_bound(4.0, row.epsilon).r);
    CHECK(row.lower_bound == static_cast<long>(std::ceil(1.0 / row.epsilon - 1e-12)));
    CHECK(row.r_found >= 1);
    CHECK(row.r_found <= row.theorem_r);
    if (row.r_verified) CHECK(row.r_found >= 1);
  }
  const auto again = scan(p, cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].r_found == rows[i].r_found);
}
