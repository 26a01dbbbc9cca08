#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace paving {

/// One SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed-splitting rule used by every Monte-Carlo loop in the library.
///
/// The seed of item `index` in stream `stream` under `root` is
///   s = splitmix(root XOR fnv1a(stream)), then splitmix(s + index).
/// Streams are named by the operation ("kesten", "pp-index", ...), so two
/// operations sharing a root seed never share trial seeds, and trial k's
/// seed does not depend on how many trials run or in what order.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

/// Deterministic random source. Identical seeds give bit-identical draws
/// within one build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  double normal();
  double uniform();  // [0, 1)
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_normal();
  Eigen::MatrixXcd ginibre(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace paving
