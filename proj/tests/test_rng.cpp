#include <set>

#include "doctest.h"
#include "paving/rng.hpp"

using namespace paving;

TEST_CASE("derive_seed is a pure function of root, stream and index") {
  CHECK(derive_seed(7, "kesten", 3) == derive_seed(7, "kesten", 3));
  CHECK(derive_seed(7, "kesten", 3) != derive_seed(7, "kesten", 4));
  CHECK(derive_seed(7, "kesten", 3) != derive_seed(7, "pp-index", 3));
  CHECK(derive_seed(7, "kesten", 3) != derive_seed(8, "kesten", 3));
}

TEST_CASE("derived seeds do not collide over a few thousand items") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t root = 0; root < 8; ++root)
    for (std::uint64_t i = 0; i < 500; ++i) seen.insert(derive_seed(root, "F", i));
  CHECK(seen.size() == 8 * 500);
}

TEST_CASE("identical seeds give identical draws") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  CHECK(a.ginibre(3, 4) == b.ginibre(3, 4));
}

TEST_CASE("uniform_int stays inside its closed range") {
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const int v = r.uniform_int(-2, 3);
    CHECK(v >= -2);
    CHECK(v <= 3);
  }
}

TEST_CASE("complex normal has unit second moment") {
  Rng r(11);
  double s = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += std::norm(r.complex_normal());
  CHECK(s / n == doctest::Approx(1.0).epsilon(0.05));
}
