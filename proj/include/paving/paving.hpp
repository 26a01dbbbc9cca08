#pragma once

// Paving problems, certificates and the independent verifier.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paving/inclusion.hpp"

namespace paving {

/// How the family F was produced, so a certificate can be re-checked from
/// its own description.
struct FamilySource {
  std::string kind = "selfadjoint";  // selfadjoint | positive | projection | contraction | jones
  int count = 1;
  std::uint64_t seed = 0;
  double theta = 0.5;  // trace of projection-kind elements
};

/// Elements of M drawn as `src` describes; element j uses derive_seed(seed, "F", j).
/// Throws SpecError for an unknown kind or a non-representable Jones projection.
std::vector<Element> generate_family(const Inclusion& inc, const FamilySource& src);

struct PavingProblem {
  Inclusion inclusion;
  std::vector<Element> F;
  double epsilon = 0.5;
  double index = 1.0;
  bool index_exact = true;

  /// Throws PreconditionError for empty F, epsilon <= 0 or elements outside M.
  void validate() const;
};

/// Uses the exact index when available, else the Monte-Carlo estimate.
PavingProblem make_problem(Inclusion inc, std::vector<Element> F, double epsilon,
                           std::optional<double> index_override = std::nullopt, std::uint64_t seed = 0);

/// (x - E_{N'∩M}(x)) / ||x - E_{N'∩M}(x)|| for every x not in N'∩M.
std::vector<Element> normalize_family(const Inclusion& inc, const std::vector<Element>& F);

enum class CertificateMode { partition, unitaries, l2 };
const char* mode_name(CertificateMode m);

struct PavingCertificate {
  CertificateMode mode = CertificateMode::partition;
  PartitionOfUnity partition;     // in N coordinates (partition and l2 modes)
  std::vector<Element> unitaries;  // in N coordinates (unitaries mode)
  std::vector<double> ratios;      // per element of F
  double max_ratio = 0.0;
  std::size_t r = 1;               // partition size or unitary count
  double epsilon = 0.0;
  double threshold = 0.0;          // verified iff max_ratio <= threshold
  bool verified = false;
  bool soundness_alarm = false;
  std::vector<std::string> alarms;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> config;
  std::vector<std::string> notes;
};

/// Operator-norm ratios ||sum_i p_i x p_i - E(x)|| / ||x - E(x)||, E = E_{N'∩M};
/// 0 when x lies in N'∩M. The partition is given in N coordinates.
PavingCertificate verify(const PartitionOfUnity& partition, const PavingProblem& problem);

/// As above for candidate projections given as elements of M. Rejects
/// (PreconditionError with the residual) candidates farther than kTolProj
/// from N or not forming a partition of 1.
PavingCertificate verify_elements(const std::vector<Element>& projections, const PavingProblem& problem);

/// Ratios for the average (1/n) sum_i u_i x u_i*, unitaries in N coordinates.
/// Flags a soundness alarm if a verified count beats the lower bound
/// n >= (tau(x) + eps)^{-1} for a positive norm-one x with E(x) = tau(x) 1.
PavingCertificate verify_unitaries(const std::vector<Element>& unitaries, const PavingProblem& problem);

/// ||.||_2 ratios for the partition; verified iff max <= n^{-1/2} + delta_l2.
PavingCertificate verify_l2(const PartitionOfUnity& partition, const PavingProblem& problem, double delta_l2);

/// The partition {1} with its ratios.
PavingCertificate trivial_certificate(const PavingProblem& problem);

}  // namespace paving
