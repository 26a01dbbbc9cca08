#pragma once

// Simulated annealing over rotated partitions u P0 u*, u in U(N).

#include <cstdint>
#include <vector>

#include "paving/paving.hpp"

namespace paving {

struct SearchConfig {
  int r = 2;
  int restarts = 3;
  long steps = 20000;          // proposals per restart
  double step_scale = 0.39269908169872414;  // pi / 8
  double cooling = 0.95;       // per sweep of total_dim(N) proposals
  double temperature = 0.02;   // initial Metropolis temperature, relative to the start objective
  std::uint64_t seed = 0;
  bool stop_at_epsilon = true;
};

struct SearchResult {
  PavingCertificate certificate;
  std::vector<double> incumbent_history;  // best objective after every sweep, over all restarts
  long proposals = 0;
  long accepted = 0;
};

/// Minimizes the max ratio over F. Throws InfeasibleError when r exceeds the
/// number of minimal projections of N.
SearchResult pave_search(const PavingProblem& problem, const SearchConfig& cfg);

}  // namespace paving
