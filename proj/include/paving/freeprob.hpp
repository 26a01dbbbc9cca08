#pragma once

// Random-matrix checks of the pinching bound for a cyclic unitary free from x.

#include <cstdint>
#include <vector>

#include "paving/algebra.hpp"
#include "paving/bounds.hpp"

namespace paving {

struct SampledPair {
  CyclicUnitary v;
  Element x;
};

/// v = w diag(roots of unity, each dim/n times) w*, x = w' D w'* with D a
/// centered clipped-Gaussian spectrum scaled into [-1, 1], w and w'
/// independent Haar unitaries of M_dim. Throws PreconditionError unless n
/// divides dim.
SampledPair sample_pair(int n, int dim, std::uint64_t seed);

/// max |tau(x_0 v^{k_1} x_1 ... v^{k_m} x_m)| over alternating words with
/// 1 <= m <= max_word_len v-letters, 1 <= k_i <= n-1, every x_i = x - tau(x).
double freeness_defect(const CyclicUnitary& v, const Element& x, int max_word_len = 4);

struct KestenExperiment {
  int n = 2;
  int dim = 512;
  int trials = 20;
  std::uint64_t seed = 0;
  double slack = 0.05;
  int defect_word_len = 0;  // 0 skips the freeness defect
};

struct KestenTrial {
  int trial = 0;
  double norm = 0.0;    // ||sum_k p_k x p_k||
  double defect = 0.0;  // freeness defect, when requested
};

struct KestenResult {
  KestenExperiment experiment;
  double bound = 0.0;
  std::vector<KestenTrial> trials;  // sorted by trial index
  double max = 0.0;
  double mean = 0.0;
  int exceedances = 0;  // trials with norm > bound + slack
};

/// Throws PreconditionError unless n >= 2, dim % n == 0 and trials >= 1.
///
/// Each trial pinches x by v's spectral partition. Since the pair (v, x) is
/// only defined up to a joint unitary conjugation, v is taken diagonal and
/// only x is rotated: the blocks of the pinching are W_k D W_k* with W_k the
/// k-th row block of a Haar unitary.
KestenResult run_kesten(const KestenExperiment& exp);

/// Trace-zero spectrum: clipped N(0,1) draws, centered, scaled by 1/max(1, max|.|).
RealVector centered_clipped_spectrum(int dim, Rng& rng);

}  // namespace paving
