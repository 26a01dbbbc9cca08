#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "paving/freeprob.hpp"

using namespace paving;

TEST_CASE("pinching equals the average over powers of the cyclic unitary") {
  for (int n = 2; n <= 4; ++n) {
    const AlgebraShape s = AlgebraShape::full_matrix(12);
    const CyclicUnitary v = cyclic_unitary_from_partition(haar_balanced_partition(s, n, n));
    CHECK(v.order == n);
    const Element x = oracle::gaussian(s, 7);
    Element avg = Element::zero(s);
    Element vk = Element::identity(s);
    for (int k = 0; k < n; ++k) {
      avg += (1.0 / n) * (vk * x * vk.adjoint());
      vk = vk * v.v;
    }
    CHECK(oracle::max_abs(vk - Element::identity(s)) < 1e-10);
    CHECK(oracle::max_abs(avg - pinch(v.partition, x)) < 1e-10);
  }
}

TEST_CASE("sampled pairs") {
  const SampledPair p = sample_pair(4, 64, 3);
  CHECK(p.v.order == 4);
  CHECK(unitarity_residual(p.v.v) < 1e-10);
  CHECK(hermiticity_residual(p.x) < 1e-12);
  CHECK(std::abs(trace(p.x)) < 1e-12);
  CHECK(op_norm(p.x) <= 1.0 + 1e-12);
  for (const auto& q : p.v.partition.parts()) CHECK(q.trace() == doctest::Approx(0.25));
  CHECK_THROWS_AS(sample_pair(3, 64, 1), PreconditionError);
}

TEST_CASE("centered clipped spectrum") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const RealVector d = centered_clipped_spectrum(100, rng);
    CHECK(std::abs(d.sum()) < 1e-12);
    CHECK(d.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("freeness defect: commuting pairs fail, Haar pairs nearly pass") {
  const AlgebraShape s = AlgebraShape::full_matrix(8);
  // q under p_0 with tau(q) = 1/4 and x = q - 1/4: tau(x v x) = tau(q)/2 = 1/8.
  const CyclicUnitary v = cyclic_unitary_from_partition(haar_balanced_partition(s, 2, 0));
  const Projection q = Projection::from_frame(s, {v.partition.part(0).frame(0).leftCols(2)});
  const Element x = q.element() - Element::scalar(s, 0.25);
  CHECK(freeness_defect(v, x, 1) == doctest::Approx(0.125));
  CHECK(freeness_defect(v, x, 2) >= 0.125 - 1e-12);
  const SampledPair p = sample_pair(2, 256, 1);
  CHECK(freeness_defect(p.v, p.x, 3) < 0.05);
}

TEST_CASE("kesten: small runs are deterministic and below the bound") {
  KestenExperiment e;
  e.n = 2;
  e.dim = 128;
  e.trials = 3;
  e.seed = 5;
  e.defect_word_len = 2;
  const KestenResult a = run_kesten(e), b = run_kesten(e);
  REQUIRE(a.trials.size() == 3);
  CHECK(a.bound == doctest::Approx(1.0));
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(a.trials[t].trial == static_cast<int>(t));
    CHECK(a.trials[t].norm == b.trials[t].norm);
    CHECK(a.trials[t].norm <= a.bound + e.slack);
    CHECK(a.trials[t].defect < 0.1);
  }
  CHECK(a.exceedances == 0);
  double mx = 0.0;
  for (const auto& t : a.trials) mx = std::max(mx, t.norm);
  CHECK(a.max == mx);
}

TEST_CASE("kesten: norms match a dense pinching of W D W*") {
  KestenExperiment e;
  e.n = 3;
  e.dim = 48;
  e.trials = 4;
  e.seed = 2;
  const KestenResult r = run_kesten(e);
  for (const auto& t : r.trials) {
    Rng rng(derive_seed(e.seed, "kesten", static_cast<std::uint64_t>(t.trial)));
    const RealVector d = centered_clipped_spectrum(e.dim, rng);
    const Matrix w = haar_matrix(e.dim, rng);
    const Matrix x = w * d.cast<complex>().asDiagonal() * w.adjoint();
    Matrix pinched = Matrix::Zero(e.dim, e.dim);
    for (int i = 0; i < e.dim; ++i)
      for (int j = 0; j < e.dim; ++j)
        if (i % e.n == j % e.n) pinched(i, j) = x(i, j);
    CHECK(std::abs(t.norm - oracle::power_norm(pinched)) < 1e-8);
  }
}

TEST_CASE("kesten preconditions") {
  KestenExperiment e;
  e.n = 1;
  CHECK_THROWS_AS(run_kesten(e), PreconditionError);
  e.n = 3;
  e.dim = 64;
  CHECK_THROWS_AS(run_kesten(e), PreconditionError);
  e.dim = 63;
  e.trials = 0;
  CHECK_THROWS_AS(run_kesten(e), PreconditionError);
}
