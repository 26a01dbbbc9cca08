#include "paving/dixmier.hpp"

#include <algorithm>
#include <cmath>

namespace paving {

namespace {

struct State {
  std::vector<Element> averages;
  std::vector<double> ratios;
  double worst = 0.0;
  std::size_t worst_index = 0;
};

void score(State& s, const std::vector<Element>& comm, const std::vector<double>& dens) {
  s.ratios.assign(s.averages.size(), 0.0);
  s.worst = 0.0;
  for (std::size_t i = 0; i < s.averages.size(); ++i) {
    if (dens[i] > 0.0) s.ratios[i] = op_norm(s.averages[i] - comm[i]) / dens[i];
    if (s.ratios[i] > s.worst) {
      s.worst = s.ratios[i];
      s.worst_index = i;
    }
  }
}

State fold_with(const State& s, const Element& w_m) {
  State next;
  const Element w_adj = w_m.adjoint();
  for (const auto& a : s.averages) next.averages.push_back((a + w_m * a * w_adj) * complex(0.5));
  return next;
}

// w = V R V* per N block, R the order-reversing permutation of V's eigenvectors.
Element reversal_unitary(const Element& h) {
  HermEig eig = herm_eig(h.hermitian_part());
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < h.num_blocks(); ++k) {
    const Matrix& v = eig.vectors[k];
    const Eigen::Index d = v.cols();
    Matrix rv(v.rows(), d);
    for (Eigen::Index i = 0; i < d; ++i) rv.col(i) = v.col(d - 1 - i);
    blocks.push_back(rv * v.adjoint());
  }
  return Element(h.shape(), std::move(blocks));
}

}  // namespace

DixmierResult dixmier_average_run(const PavingProblem& problem, const DixmierConfig& cfg) {
  problem.validate();
  const Inclusion& inc = problem.inclusion;
  for (const auto& x : problem.F)
    if (hermiticity_residual(x) > kTolProj)
      throw PreconditionError("dixmier: F must be self-adjoint", hermiticity_residual(x));

  std::vector<Element> comm;
  std::vector<double> dens;
  for (const auto& x : problem.F) {
    comm.push_back(inc.cond_exp_comm(x));
    const double d = op_norm(x - comm.back());
    dens.push_back(d <= 1e-12 * std::max(1.0, op_norm(x)) ? 0.0 : d);
  }

  DixmierResult res;
  std::vector<Element> family{Element::identity(inc.n_shape())};
  State state;
  state.averages = problem.F;
  score(state, comm, dens);
  res.history.push_back(state.worst);

  int step = 0;
  while (state.worst > problem.epsilon && step < cfg.max_steps) {
    const Element centered = state.averages[state.worst_index] - comm[state.worst_index];
    Element w = reversal_unitary(inc.cond_exp_n_coords(centered));
    State next = fold_with(state, inc.embed(w));
    score(next, comm, dens);
    if (next.worst > 0.99 * state.worst) {
      if (res.haar_steps >= cfg.stall_budget) {
        res.stalled = true;
        break;
      }
      w = random_haar_unitary(inc.n_shape(), derive_seed(cfg.seed, "dixmier-haar", static_cast<std::uint64_t>(step)));
      next = fold_with(state, inc.embed(w));
      score(next, comm, dens);
      ++res.haar_steps;
    } else {
      ++res.folds;
    }
    const std::size_t size = family.size();
    for (std::size_t i = 0; i < size; ++i) family.push_back(w * family[i]);
    state = std::move(next);
    res.history.push_back(state.worst);
    ++step;
  }

  res.certificate = verify_unitaries(family, problem);
  res.certificate.seed = cfg.seed;
  res.certificate.config = {{"max_steps", cfg.max_steps},
                            {"stall_budget", cfg.stall_budget},
                            {"folds", res.folds},
                            {"haar_steps", res.haar_steps}};
  if (res.stalled) res.certificate.notes.push_back("stall budget exhausted");
  return res;
}

}  // namespace paving
