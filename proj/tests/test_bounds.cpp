#include <cmath>

#include "doctest.h"
#include "paving/bounds.hpp"
#include "paving/error.hpp"

using namespace paving;

TEST_CASE("theorem_bound examples") {
  TheoremBound b = theorem_bound(4, 1);
  CHECK(b.n == 16);
  CHECK(b.m == 16);
  CHECK(b.r == 256);
  b = theorem_bound(2, 0.5);
  CHECK(b.n == 64);
  CHECK(b.m == 32);
  CHECK(b.r == 2048);
  b = theorem_bound(1, 2);
  CHECK(b.n == 4);
  CHECK(b.m == 1);
  CHECK(b.r == 4);
  b = theorem_bound(4, 0.9);
  CHECK(b.n == 20);
  CHECK(b.m == 20);
  CHECK(b.r == 400);
  CHECK_THROWS_AS(theorem_bound(4, 0), PreconditionError);
  CHECK_THROWS_AS(theorem_bound(0.5, 0.5), PreconditionError);
}

TEST_CASE("property: theorem_bound matches independent ceilings") {
  for (int i = 1; i <= 200; ++i) {
    const double eps = 0.05 + 0.01 * i;
    const double index = 1.0 + 0.37 * (i % 13);
    const TheoremBound b = theorem_bound(index, eps);
    // Ceiling by counting up, away from round-off at exact integers.
    auto count_up = [](double v) {
      long k = 0;
      while (static_cast<double>(k) < v * (1 - 1e-12)) ++k;
      return k;
    };
    CHECK(b.n == count_up(16 / (eps * eps)));
    CHECK(b.m == count_up(4 * index / (eps * eps)));
    CHECK(b.r == b.n * b.m);
  }
}

TEST_CASE("lemma24_lower_bound examples") {
  CHECK(lemma24_lower_bound(0.05, 0.05) == doctest::Approx(10.0));
  CHECK(lemma24_lower_bound(1, 1) == doctest::Approx(0.5));
  CHECK(lemma24_lower_bound(0, 0.2) == doctest::Approx(5.0));
  CHECK(lemma24_lower_bound(1e-12, 0.25) == doctest::Approx(4.0));
  CHECK_THROWS_AS(lemma24_lower_bound(1, 0), PreconditionError);
  CHECK_THROWS_AS(lemma24_lower_bound(-0.1, 0.5), PreconditionError);
}

TEST_CASE("dixmier bound examples") {
  CHECK(dixmier_exponent() == doctest::Approx(1.7095).epsilon(1e-4));
  CHECK(dixmier_count_bound(0.5) == 4);
  CHECK(dixmier_count_bound(0.25) == 11);
  CHECK(dixmier_count_bound(0.1) == 52);
  CHECK(dixmier_count_bound(1 - 1e-12) == 1);
  CHECK(dixmier_count_bound(1 - 1e-3) == 2);
  CHECK_THROWS_AS(dixmier_count_bound(1.0), PreconditionError);
  CHECK_THROWS_AS(dixmier_count_bound(0.0), PreconditionError);
}

TEST_CASE("kesten bound") {
  CHECK(kesten_bound(1) == 0.0);
  CHECK(kesten_bound(2) == doctest::Approx(1.0));
  CHECK(kesten_bound(4) == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(kesten_bound(4) <= 0.866026);
  for (int n = 2; n < 50; ++n) CHECK(kesten_bound(n + 1) < kesten_bound(n));
  CHECK_THROWS_AS(kesten_bound(0), PreconditionError);
}

TEST_CASE("guarded_ceil ignores round-off above integers") {
  CHECK(guarded_ceil(16 / (0.5 * 0.5)) == 64);
  CHECK(guarded_ceil(4.0000000000001) == 4);
  CHECK(guarded_ceil(4.01) == 5);
  CHECK(guarded_ceil(1.0 / 0.3 / 0.3) == 12);
}
