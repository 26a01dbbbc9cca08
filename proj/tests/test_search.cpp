#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "paving/search.hpp"

using namespace paving;

namespace {

// 2p - 1 for a diagonal rank-32 projection p of M_64: selfadjoint, trace zero.
Element centered_projection(const AlgebraShape& s) {
  Matrix d = Matrix::Identity(64, 64);
  for (int i = 32; i < 64; ++i) d(i, i) = -1.0;
  return Element(s, {d});
}

}  // namespace

TEST_CASE("r = 1 has ratio 1 off the relative commutant") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(8));
  const PavingProblem p = make_problem(inc, {oracle::gaussian_hermitian(inc.m_shape(), 3)}, 0.5);
  SearchConfig cfg;
  cfg.r = 1;
  cfg.steps = 100;
  const SearchResult r = pave_search(p, cfg);
  CHECK(r.certificate.max_ratio == doctest::Approx(1.0));
  CHECK_FALSE(r.certificate.verified);
}

TEST_CASE("elements of N'∩M give ratio 0") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(4, 2));
  const Element y = inc.cond_exp_comm(oracle::gaussian_hermitian(inc.m_shape(), 1));
  const SearchResult r = pave_search(make_problem(inc, {y}, 0.1), SearchConfig{});
  CHECK(r.certificate.max_ratio == 0.0);
  CHECK(r.certificate.verified);
}

TEST_CASE("diagonal MASA of M_8: ratios stay at most 1") {
  // N = D_8 ⊂ M_8: every partition of N is diagonal, so the ratio of any
  // x is that of its off-diagonal part.
  const InclusionSpec spec{AlgebraShape({1, 1, 1, 1, 1, 1, 1, 1}, std::vector<double>(8, 0.125)),
                           AlgebraShape::full_matrix(8),
                           {{1}, {1}, {1}, {1}, {1}, {1}, {1}, {1}}};
  const Inclusion inc = Inclusion::build(spec);
  const PavingProblem p = make_problem(inc, {oracle::gaussian_hermitian(inc.m_shape(), 2)}, 0.99);
  SearchConfig cfg;
  cfg.r = 2;
  cfg.steps = 200;
  const SearchResult r = pave_search(p, cfg);
  CHECK(r.certificate.max_ratio <= 1.0 + 1e-9);
}

TEST_CASE("M_64: a rank-32 centered projection at epsilon 1/2") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(64));
  const PavingProblem p = make_problem(inc, {centered_projection(inc.m_shape())}, 0.5);
  SearchConfig cfg;
  cfg.r = 16;
  cfg.steps = 6000;
  cfg.seed = 11;
  const SearchResult r = pave_search(p, cfg);
  CHECK(r.certificate.verified);
  CHECK(r.certificate.r <= 16);
  CHECK(r.certificate.max_ratio <= 0.5 + 1e-9);
}

TEST_CASE("property: the incumbent never increases and matches the verifier") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    CAPTURE(s);
    const Inclusion inc = Inclusion::build(InclusionSpec::tensor(6, 2));
    const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 2, s, 0.5}), 0.05);
    SearchConfig cfg;
    cfg.r = 3;
    cfg.steps = 300;
    cfg.restarts = 2;
    cfg.seed = s;
    const SearchResult r = pave_search(p, cfg);
    REQUIRE_FALSE(r.incumbent_history.empty());
    for (std::size_t i = 1; i < r.incumbent_history.size(); ++i)
      CHECK(r.incumbent_history[i] <= r.incumbent_history[i - 1]);
    CHECK(std::abs(r.certificate.max_ratio - r.incumbent_history.back()) < 1e-8);
    CHECK(r.certificate.r == 3);
    const SearchResult again = pave_search(p, cfg);
    CHECK(again.certificate.ratios == r.certificate.ratios);
  }
}

TEST_CASE("r above the number of minimal projections is infeasible") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(2, 2));
  SearchConfig cfg;
  cfg.r = 3;
  CHECK_THROWS_AS(pave_search(make_problem(inc, {oracle::gaussian_hermitian(inc.m_shape(), 1)}, 0.5), cfg),
                  InfeasibleError);
}
