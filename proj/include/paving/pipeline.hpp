#pragma once

// The constructive paving pipeline: a Haar-rotated cyclic partition of N,
// exceptional spectral projections, the support bound, small-support
// refinement, and per-stage checks of the inequalities that tie them together.

#include <cstdint>
#include <vector>

#include "paving/paving.hpp"

namespace paving {

struct PipelineConfig {
  int n = 0;                   // outer partition size; 0 means theorem_bound
  int m = 0;                   // refinement size; 0 means theorem_bound
  double delta_prime = -1.0;   // < 4/n^2; negative means 2/n^2
  int retry_budget = 5;
  double trace_budget = -1.0;  // bound on tau(q_i); negative means eps^2 / (4 index |F|)^2
  int kadison_samples = 100;
  std::uint64_t seed = 0;
};

/// One (outer part i, element x) pair of the accepted attempt.
struct StageRecord {
  int part = 0;
  int element = 0;
  double q_trace = 0.0;          // tau(q_i)
  double off_q_norm = 0.0;       // ||p_i x (p_i - q_i)||
  double off_q_bound = 0.0;      // (4(n-1)/n^2 + delta')^{1/2}
  double support_trace = 0.0;    // tau(s(E_N(b_{i,x})))
  double support_bound = 0.0;    // index tau(q_i)
  double refined_value = 0.0;    // ||sum_j q_j E_N(b) q_j||
  double refined_bound = 0.0;    // 1/m
  double pp_residual = 0.0;      // index ||sum_j q_j E_N(b) q_j|| - ||sum_j q_j b q_j||
  double kadison_residual = 0.0;  // lambda_min(Phi(b) - Phi(p x q)* Phi(p x q))
  double term_a = 0.0;           // ||Phi_i(p_i x (p_i - q_i))||
  double term_b = 0.0;           // ||Phi_i(p_i x q_i)||
};

struct PipelineResult {
  PavingCertificate certificate;
  int n = 0;
  int m = 0;
  double delta_prime = 0.0;
  double threshold = 0.0;        // 4(n-1)/n^2 + delta'
  double trace_budget = 0.0;
  double final_bound = 0.0;      // threshold^{1/2} + (index/m)^{1/2}
  int attempts = 0;
  bool fallback = false;         // retries exhausted; support ignored in the refinement
  bool boundary_warning = false;
  std::vector<std::string> attempt_log;
  std::vector<StageRecord> stages;
  double kadison_min = 0.0;      // min over random y of lambda_min(Phi(y*y) - Phi(y)*Phi(y))
  double max_q_trace = 0.0;
};

/// Runs the pipeline. Throws PreconditionError for delta' >= 4/n^2 and
/// ResourceError when some outer part has fewer than m minimal projections.
PipelineResult pave_constructive(const PavingProblem& problem, const PipelineConfig& cfg);

}  // namespace paving
