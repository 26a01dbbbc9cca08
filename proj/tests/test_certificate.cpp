#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "paving/bounds.hpp"
#include "paving/paving.hpp"

using namespace paving;

namespace {

PavingProblem problem_for(const InclusionSpec& spec, std::vector<Element> F, double eps) {
  return make_problem(Inclusion::build(spec), std::move(F), eps);
}

}  // namespace

TEST_CASE("problem validation") {
  const Inclusion inc = Inclusion::build(InclusionSpec::scalars_in(2));
  CHECK_THROWS_AS(make_problem(inc, {}, 0.5), PreconditionError);
  CHECK_THROWS_AS(make_problem(inc, {Element::identity(inc.m_shape())}, 0.0), PreconditionError);
  CHECK_THROWS_AS(make_problem(inc, {Element::identity(AlgebraShape::full_matrix(3))}, 0.5), MalformedElementError);
  CHECK_THROWS_AS(make_problem(inc, {Element::identity(inc.m_shape())}, 0.5, 0.5), PreconditionError);
}

TEST_CASE("family generation") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(2, 2));
  const auto F = generate_family(inc, {"selfadjoint", 3, 7, 0.5});
  REQUIRE(F.size() == 3);
  const auto G = generate_family(inc, {"selfadjoint", 3, 7, 0.5});
  for (std::size_t i = 0; i < 3; ++i) CHECK(oracle::max_abs(F[i] - G[i]) == 0.0);
  CHECK(oracle::max_abs(F[0] - F[1]) > 1e-3);
  for (const auto& x : generate_family(inc, {"positive", 2, 1, 0.5})) CHECK(min_eigenvalue(x) >= -1e-12);
  for (const auto& x : generate_family(inc, {"contraction", 2, 1, 0.5})) CHECK(op_norm(x) <= 1 + 1e-12);
  for (const auto& x : generate_family(inc, {"projection", 2, 1, 0.25})) CHECK(trace(x).real() == doctest::Approx(0.25));
  const auto J = generate_family(inc, {"jones", 1, 0, 0.5});
  CHECK(oracle::max_abs(inc.cond_exp_n(J[0]) - Element::scalar(inc.m_shape(), 0.25)) < 1e-12);
  CHECK_THROWS_AS(generate_family(inc, {"bogus", 1, 0, 0.5}), SpecError);
  CHECK_THROWS_AS(generate_family(Inclusion::build(InclusionSpec::scalars_in(3)), {"jones", 1, 0, 0.5}), SpecError);
}

TEST_CASE("normalize_family centers and scales, dropping N'∩M") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(2, 2));
  std::vector<Element> F = generate_family(inc, {"contraction", 4, 3, 0.5});
  F.push_back(inc.cond_exp_comm(F[0]));
  const auto out = normalize_family(inc, F);
  CHECK(out.size() == 4);
  for (const auto& y : out) {
    CHECK(op_norm(y) == doctest::Approx(1.0));
    CHECK(oracle::max_abs(inc.cond_exp_comm(y)) < 1e-12);
  }
}

TEST_CASE("{1} against F inside N'∩M verifies with ratio 0") {
  const Inclusion inc = Inclusion::build(InclusionSpec::tensor(2, 2));
  const Element y = inc.cond_exp_comm(oracle::gaussian(inc.m_shape(), 1));
  const PavingProblem p = make_problem(inc, {y}, 0.1);
  const PavingCertificate c = trivial_certificate(p);
  CHECK(c.verified);
  CHECK(c.r == 1);
  CHECK(c.max_ratio == 0.0);
}

TEST_CASE("the trivial partition has ratio 1 off N'∩M") {
  const PavingProblem p = problem_for(InclusionSpec::factor(6), {oracle::gaussian_hermitian(AlgebraShape::full_matrix(6), 2)}, 0.5);
  const PavingCertificate c = trivial_certificate(p);
  CHECK(c.max_ratio == doctest::Approx(1.0));
  CHECK_FALSE(c.verified);
  const PavingProblem q = problem_for(InclusionSpec::factor(6), p.F, 1.5);
  CHECK(trivial_certificate(q).verified);
}

TEST_CASE("invalid partitions are rejected") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(2));
  const PavingProblem p = make_problem(inc, {oracle::gaussian_hermitian(inc.m_shape(), 1)}, 0.5);
  const Element e11 = Element(inc.m_shape(), {Matrix::Identity(2, 2).leftCols(1) * Matrix::Identity(2, 2).topRows(1)});
  CHECK_THROWS_AS(verify_elements({e11}, p), PreconditionError);
  CHECK_THROWS_AS(verify_elements({e11, e11}, p), PreconditionError);

  const Inclusion s = Inclusion::build(InclusionSpec::scalars_in(2));
  const PavingProblem ps = make_problem(s, {oracle::gaussian_hermitian(s.m_shape(), 1)}, 0.5);
  const Element one = Element::identity(s.m_shape());
  CHECK_THROWS_AS(verify_elements({e11, one - e11}, ps), PreconditionError);
}

TEST_CASE("ratios match a hand computation with dense matrices") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Inclusion inc = Inclusion::build(InclusionSpec::tensor(4, 2), s, true);
    const auto F = generate_family(inc, {"selfadjoint", 2, s, 0.5});
    const PavingProblem p = make_problem(inc, F, 0.5);
    const PartitionOfUnity part = haar_balanced_partition(inc.n_shape(), 2, s);
    const PavingCertificate c = verify(part, p);
    const PartitionOfUnity emb = inc.embed_partition(part);
    for (std::size_t i = 0; i < F.size(); ++i) {
      const Element ec = oracle::cond_exp_comm(inc, F[i]);
      Matrix pinched = Matrix::Zero(8, 8);
      for (const auto& q : emb.parts()) {
        const Matrix qd = oracle::dense(q.element());
        pinched += qd * oracle::dense(F[i]) * qd;
      }
      const double want = oracle::power_norm(pinched - oracle::dense(ec)) / oracle::power_norm(oracle::dense(F[i] - ec));
      CHECK(std::abs(c.ratios[i] - want) < 1e-8);
    }
    // Same ratios when the candidate is given as elements of M.
    std::vector<Element> ps;
    for (const auto& q : emb.parts()) ps.push_back(q.element());
    const PavingCertificate d = verify_elements(ps, p);
    for (std::size_t i = 0; i < F.size(); ++i) CHECK(std::abs(c.ratios[i] - d.ratios[i]) < 1e-10);
  }
}

TEST_CASE("property: verification is deterministic") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Inclusion inc = Inclusion::build(InclusionSpec::tensor(3, 2));
    const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 3, s, 0.5}), 0.7);
    const PartitionOfUnity part = haar_balanced_partition(inc.n_shape(), 3, s + 1);
    const PavingCertificate a = verify(part, p), b = verify(part, p);
    CHECK(a.ratios == b.ratios);
    CHECK(a.verified == b.verified);
    CHECK(a.verified == (a.max_ratio <= p.epsilon + 1e-9));
  }
}

TEST_CASE("unitary verification and the lower-bound alarm") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(2));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  Matrix swap = Matrix::Zero(2, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;
  const PavingProblem p = make_problem(inc, {Element(inc.m_shape(), {d})}, 0.1);
  const PavingCertificate c =
      verify_unitaries({Element::identity(inc.n_shape()), Element(inc.n_shape(), {swap})}, p);
  CHECK(c.verified);
  CHECK(c.r == 2);
  CHECK(c.max_ratio < 1e-15);
  CHECK_THROWS_AS(verify_unitaries({}, p), PreconditionError);
  CHECK_THROWS_AS(verify_unitaries({2.0 * Element::identity(inc.n_shape())}, p), PreconditionError);

  // Rank-one projection in M_2: tau = 1/2, a verified pair of unitaries must
  // respect n >= (1/2 + eps)^{-1}.
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1.0;
  const PavingProblem q = make_problem(inc, {Element(inc.m_shape(), {e})}, 0.1);
  const PavingCertificate cq =
      verify_unitaries({Element::identity(inc.n_shape()), Element(inc.n_shape(), {swap})}, q);
  CHECK(cq.verified);
  CHECK_FALSE(cq.soundness_alarm);
  CHECK(static_cast<double>(cq.r) >= lemma24_lower_bound(0.5, 0.1) - 1e-9);
}

TEST_CASE("l2 verification uses n^{-1/2} + delta") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(16));
  const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 1, 3, 0.5}), 0.5);
  const PavingCertificate c = verify_l2(haar_balanced_partition(inc.n_shape(), 4, 1), p, 0.05);
  CHECK(c.mode == CertificateMode::l2);
  CHECK(c.threshold == doctest::Approx(0.55));
  CHECK(c.verified == (c.max_ratio <= c.threshold));
  const PavingCertificate one = verify_l2(PartitionOfUnity::trivial(inc.n_shape()), p, 0.0);
  CHECK(one.max_ratio == doctest::Approx(1.0));
}
