#pragma once

// Dixmier averaging by eigenvalue-order-reversal folds.

#include <cstdint>
#include <vector>

#include "paving/paving.hpp"

namespace paving {

struct DixmierConfig {
  int max_steps = 12;    // the unitary family doubles every step
  int stall_budget = 4;  // Haar fallback steps allowed
  std::uint64_t seed = 0;
};

struct DixmierResult {
  PavingCertificate certificate;  // unitaries mode
  std::vector<double> history;    // worst ratio before the first step and after each step
  int folds = 0;
  int haar_steps = 0;
  bool stalled = false;           // stall budget exhausted
};

/// Starting from {1}, repeatedly picks the worst element's current average
/// y, builds w in U(N) that reverses the eigenvalue order of E_N(y - E(y))
/// block by block, and replaces every average a by (a + w a w*)/2, i.e. the
/// family U by U ∪ wU. A fold that cuts the worst ratio by less than 1% is
/// replaced by a Haar-random w. Stops once every ratio is <= epsilon.
/// Throws PreconditionError when F is not self-adjoint.
DixmierResult dixmier_average_run(const PavingProblem& problem, const DixmierConfig& cfg);

}  // namespace paving
