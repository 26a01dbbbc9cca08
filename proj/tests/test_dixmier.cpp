#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "paving/bounds.hpp"
#include "paving/dixmier.hpp"

using namespace paving;

TEST_CASE("diag(1, -1) in M_2 is averaged to 0 by two unitaries") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(2));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  const DixmierResult r = dixmier_average_run(make_problem(inc, {Element(inc.m_shape(), {d})}, 0.1), DixmierConfig{});
  CHECK(r.certificate.verified);
  CHECK(r.certificate.r == 2);
  CHECK(r.certificate.max_ratio < 1e-12);
  CHECK(r.folds == 1);
  CHECK(r.history.front() == doctest::Approx(1.0));
}

TEST_CASE("F inside N'∩M needs only the identity") {
  const Inclusion inc = Inclusion::build(InclusionSpec::scalars_in(3));
  const DixmierResult r =
      dixmier_average_run(make_problem(inc, {oracle::gaussian_hermitian(inc.m_shape(), 1)}, 0.1), DixmierConfig{});
  CHECK(r.certificate.r == 1);
  CHECK(r.certificate.verified);
}

TEST_CASE("non-selfadjoint F is rejected") {
  const Inclusion inc = Inclusion::build(InclusionSpec::factor(3));
  CHECK_THROWS_AS(dixmier_average_run(make_problem(inc, {oracle::gaussian(inc.m_shape(), 1)}, 0.5), DixmierConfig{}),
                  PreconditionError);
}

TEST_CASE("property: M_64 at epsilon 1/4 within the count bound") {
  const long bound = dixmier_count_bound(0.25);
  CHECK(bound == 11);
  for (std::uint64_t s = 0; s < 5; ++s) {
    CAPTURE(s);
    const Inclusion inc = Inclusion::build(InclusionSpec::factor(64));
    const PavingProblem p = make_problem(inc, generate_family(inc, {"selfadjoint", 1, s, 0.5}), 0.25);
    DixmierConfig cfg;
    cfg.seed = s;
    const DixmierResult r = dixmier_average_run(p, cfg);
    CHECK(r.certificate.verified);
    CHECK(static_cast<long>(r.certificate.r) <= bound);
    CHECK_FALSE(r.certificate.soundness_alarm);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] + 1e-12);
    // The certificate re-verifies from its unitaries alone.
    const PavingCertificate again = verify_unitaries(r.certificate.unitaries, p);
    CHECK(std::abs(again.max_ratio - r.certificate.max_ratio) < 1e-12);
  }
}
