#include "paving/paving.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paving/bounds.hpp"
#include "paving/index.hpp"

namespace paving {

std::vector<Element> generate_family(const Inclusion& inc, const FamilySource& src) {
  if (src.count < 1) throw SpecError("family needs at least one element");
  std::vector<Element> F;
  const AlgebraShape& ms = inc.m_shape();
  for (int j = 0; j < src.count; ++j) {
    const std::uint64_t s = derive_seed(src.seed, "F", static_cast<std::uint64_t>(j));
    if (src.kind == "selfadjoint") {
      F.push_back(random_element(ms, RandomKind::selfadjoint_trace_zero_contraction, s));
    } else if (src.kind == "positive") {
      F.push_back(random_element(ms, RandomKind::positive_contraction, s));
    } else if (src.kind == "projection") {
      F.push_back(random_element(ms, RandomKind::projection, s, src.theta));
    } else if (src.kind == "contraction") {
      F.push_back(random_contraction(ms, s));
    } else if (src.kind == "jones") {
      auto e = jones_projection(inc);
      if (!e) throw SpecError("no Jones projection with E_N(e) = [M:N]^{-1} 1 is representable for this inclusion");
      F.push_back(*e);
    } else {
      throw SpecError("unknown element kind '" + src.kind +
                      "' (expected selfadjoint, positive, projection, contraction or jones)");
    }
  }
  return F;
}

void PavingProblem::validate() const {
  if (F.empty()) throw PreconditionError("paving problem: F is empty");
  if (!(epsilon > 0.0)) throw PreconditionError("paving problem: epsilon must be positive");
  if (!(index >= 1.0)) throw PreconditionError("paving problem: index must be >= 1");
  for (const auto& x : F)
    if (!(x.shape() == inclusion.m_shape())) throw MalformedElementError("paving problem: element of F is not in M");
}

PavingProblem make_problem(Inclusion inc, std::vector<Element> F, double epsilon, std::optional<double> index_override,
                           std::uint64_t seed) {
  PavingProblem p;
  p.index_exact = !index_override && inc.exact_index().has_value();
  p.index = resolve_index(inc, index_override, 2000, derive_seed(seed, "problem-index", 0));
  p.inclusion = std::move(inc);
  p.F = std::move(F);
  p.epsilon = epsilon;
  p.validate();
  return p;
}

std::vector<Element> normalize_family(const Inclusion& inc, const std::vector<Element>& F) {
  std::vector<Element> out;
  for (const auto& x : F) {
    Element c = x - inc.cond_exp_comm(x);
    const double n = op_norm(c);
    if (n <= 1e-12 * std::max(1.0, op_norm(x))) continue;
    out.push_back(c * complex(1.0 / n));
  }
  return out;
}

const char* mode_name(CertificateMode m) {
  switch (m) {
    case CertificateMode::partition:
      return "partition";
    case CertificateMode::unitaries:
      return "unitaries";
    case CertificateMode::l2:
      return "l2";
  }
  return "partition";
}

namespace {

template <class Apply, class Norm>
std::vector<double> ratios_for(const PavingProblem& problem, Apply apply, Norm norm) {
  std::vector<double> ratios;
  for (const auto& x : problem.F) {
    const Element ec = problem.inclusion.cond_exp_comm(x);
    const double den = norm(x - ec);
    if (den <= 1e-12 * std::max(1.0, norm(x))) {
      ratios.push_back(0.0);
      continue;
    }
    ratios.push_back(norm(apply(x) - ec) / den);
  }
  return ratios;
}

void finish(PavingCertificate& c) {
  c.max_ratio = c.ratios.empty() ? 0.0 : *std::max_element(c.ratios.begin(), c.ratios.end());
  c.verified = c.max_ratio <= c.threshold;
}

}  // namespace

PavingCertificate verify(const PartitionOfUnity& partition, const PavingProblem& problem) {
  problem.validate();
  if (!(partition.shape() == problem.inclusion.n_shape()))
    throw MalformedElementError("verify: partition does not live in N");
  const PartitionOfUnity embedded = problem.inclusion.embed_partition(partition);
  PavingCertificate c;
  c.mode = CertificateMode::partition;
  c.partition = partition;
  c.r = partition.size();
  c.epsilon = problem.epsilon;
  c.threshold = problem.epsilon + 1e-9;
  c.ratios = ratios_for(
      problem, [&](const Element& x) { return pinch(embedded, x); }, [](const Element& y) { return op_norm(y); });
  finish(c);
  return c;
}

PavingCertificate verify_elements(const std::vector<Element>& projections, const PavingProblem& problem) {
  const Inclusion& inc = problem.inclusion;
  std::vector<Projection> parts;
  for (const auto& p : projections) {
    if (!(p.shape() == inc.m_shape())) throw MalformedElementError("verify: candidate is not in M");
    const Element pn = inc.cond_exp_n_coords(p);
    const Element back = inc.embed(pn);
    double res = 0.0;
    for (std::size_t l = 0; l < p.num_blocks(); ++l) res = std::max(res, (p.block(l) - back.block(l)).norm());
    if (res > kTolProj) throw PreconditionError("verify: candidate projection does not lie in N", res);
    parts.push_back(Projection::from_element(pn));
  }
  return verify(PartitionOfUnity(std::move(parts)), problem);
}

PavingCertificate verify_unitaries(const std::vector<Element>& unitaries, const PavingProblem& problem) {
  problem.validate();
  if (unitaries.empty()) throw PreconditionError("verify: empty unitary list");
  const Inclusion& inc = problem.inclusion;
  std::vector<Element> embedded;
  for (const auto& u : unitaries) {
    if (!(u.shape() == inc.n_shape())) throw MalformedElementError("verify: unitary does not live in N");
    const double res = unitarity_residual(u);
    if (res > kTolProj) throw PreconditionError("verify: candidate is not unitary", res);
    embedded.push_back(inc.embed(u));
  }
  PavingCertificate c;
  c.mode = CertificateMode::unitaries;
  c.unitaries = unitaries;
  c.r = unitaries.size();
  c.epsilon = problem.epsilon;
  c.threshold = problem.epsilon + 1e-9;
  c.ratios = ratios_for(
      problem, [&](const Element& x) { return unitary_average(embedded, x); },
      [](const Element& y) { return op_norm(y); });
  finish(c);

  if (c.verified) {
    for (std::size_t i = 0; i < problem.F.size(); ++i) {
      const Element& x = problem.F[i];
      if (hermiticity_residual(x) > 1e-9) continue;
      if (std::abs(op_norm(x) - 1.0) > 1e-9 || min_eigenvalue(x) < -1e-9) continue;
      const double tau = trace(x).real();
      const Element centered = inc.cond_exp_comm(x) - Element::scalar(x.shape(), tau);
      if (op_norm(centered) > 1e-9) continue;
      const double bound = lemma24_lower_bound(std::max(0.0, tau), problem.epsilon);
      if (static_cast<double>(c.r) < bound - 1e-9) {
        c.soundness_alarm = true;
        std::ostringstream os;
        os << "element " << i << ": verified with " << c.r << " unitaries, below the lower bound " << bound;
        c.alarms.push_back(os.str());
      }
    }
  }
  return c;
}

PavingCertificate verify_l2(const PartitionOfUnity& partition, const PavingProblem& problem, double delta_l2) {
  problem.validate();
  if (!(partition.shape() == problem.inclusion.n_shape()))
    throw MalformedElementError("verify: partition does not live in N");
  const PartitionOfUnity embedded = problem.inclusion.embed_partition(partition);
  PavingCertificate c;
  c.mode = CertificateMode::l2;
  c.partition = partition;
  c.r = partition.size();
  c.epsilon = problem.epsilon;
  c.threshold = 1.0 / std::sqrt(static_cast<double>(partition.size())) + delta_l2;
  c.ratios = ratios_for(
      problem, [&](const Element& x) { return pinch(embedded, x); }, [](const Element& y) { return l2_norm(y); });
  finish(c);
  return c;
}

PavingCertificate trivial_certificate(const PavingProblem& problem) {
  return verify(PartitionOfUnity::trivial(problem.inclusion.n_shape()), problem);
}

}  // namespace paving
