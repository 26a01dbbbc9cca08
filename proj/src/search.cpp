#include "paving/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace paving {

namespace {

class Annealer {
 public:
  Annealer(const PavingProblem& problem, int r) : inc_(problem.inclusion), r_(r) {
    const AlgebraShape& ns = inc_.n_shape();
    labels_ = balanced_labels(ns, r);
    for (const auto& x : problem.F) {
      Element c = x - inc_.cond_exp_comm(x);
      const double den = op_norm(c);
      if (den <= 1e-12 * std::max(1.0, op_norm(x))) continue;
      xs_.push_back(std::move(c));
      dens_.push_back(den);
    }
    const AlgebraShape& ms = inc_.m_shape();
    sets_.assign(ms.num_blocks(), std::vector<std::vector<Eigen::Index>>(r));
    for (std::size_t l = 0; l < ms.num_blocks(); ++l)
      for (std::size_t k = 0; k < ns.num_blocks(); ++k) {
        const int mult = inc_.multiplicity(k, l);
        for (int a = 0; a < ns.dim(k); ++a)
          for (int c = 0; c < mult; ++c) sets_[l][labels_[k][a]].push_back(inc_.offset(k, l) + a * mult + c);
      }
    for (std::size_t k = 0; k < ns.num_blocks(); ++k) {
      const auto& lk = labels_[k];
      if (std::any_of(lk.begin(), lk.end(), [&](int v) { return v != lk.front(); })) movable_.push_back(k);
    }
  }

  bool empty() const { return xs_.empty(); }
  bool movable() const { return !movable_.empty(); }

  void load(const std::vector<Matrix>& u) {
    u_ = u;
    resync();
  }

  void resync() {
    const AlgebraShape& ms = inc_.m_shape();
    const AlgebraShape& ns = inc_.n_shape();
    std::vector<Matrix> frames;
    for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
      Matrix e = Matrix::Zero(ms.dim(l), ms.dim(l));
      for (std::size_t k = 0; k < ns.num_blocks(); ++k) {
        if (inc_.multiplicity(k, l) == 0) continue;
        Matrix f = inc_.embed_frame(u_[k], k, l);
        e.middleCols(inc_.offset(k, l), f.cols()) = f;
      }
      frames.push_back(std::move(e));
    }
    y_.assign(xs_.size(), {});
    norms_.assign(xs_.size(), std::vector<std::vector<double>>(ms.num_blocks(), std::vector<double>(r_, 0.0)));
    for (std::size_t x = 0; x < xs_.size(); ++x)
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        y_[x].push_back(frames[l].adjoint() * xs_[x].block(l) * frames[l]);
        for (int i = 0; i < r_; ++i) norms_[x][l][i] = part_norm(x, l, i);
      }
  }

  double objective() const {
    double best = 0.0;
    for (std::size_t x = 0; x < xs_.size(); ++x)
      for (const auto& row : norms_[x])
        for (double v : row) best = std::max(best, v / dens_[x]);
    return best;
  }

  // Random Givens rotation between two N indices with different labels.
  struct Move {
    std::size_t k;
    int a, b;
    complex c, s;
  };

  Move propose(Rng& rng, double scale) const {
    const AlgebraShape& ns = inc_.n_shape();
    long total = 0;
    for (std::size_t k : movable_) total += ns.dim(k);
    long pick = rng.uniform_int(0, static_cast<int>(total - 1));
    std::size_t k = movable_.front();
    for (std::size_t kk : movable_) {
      if (pick < ns.dim(kk)) {
        k = kk;
        break;
      }
      pick -= ns.dim(kk);
    }
    const int d = ns.dim(k);
    int a = rng.uniform_int(0, d - 1);
    int b = rng.uniform_int(0, d - 1);
    while (labels_[k][a] == labels_[k][b]) {
      a = rng.uniform_int(0, d - 1);
      b = rng.uniform_int(0, d - 1);
    }
    const double theta = scale * (2.0 * rng.uniform() - 1.0);
    const double phi = 2.0 * M_PI * rng.uniform();
    return Move{k, a, b, std::cos(theta), std::polar(std::sin(theta), phi)};
  }

  void apply(const Move& mv, bool inverse) {
    const complex c = mv.c;
    const complex s = inverse ? -mv.s : mv.s;
    // u <- u G with G(a,a) = G(b,b) = c, G(b,a) = s, G(a,b) = -conj(s).
    Matrix& u = u_[mv.k];
    const Eigen::VectorXcd ua = u.col(mv.a), ub = u.col(mv.b);
    u.col(mv.a) = c * ua + s * ub;
    u.col(mv.b) = -std::conj(s) * ua + c * ub;
    const AlgebraShape& ms = inc_.m_shape();
    for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
      const int mult = inc_.multiplicity(mv.k, l);
      const int off = inc_.offset(mv.k, l);
      for (int cc = 0; cc < mult; ++cc) {
        const Eigen::Index ia = off + mv.a * mult + cc;
        const Eigen::Index ib = off + mv.b * mult + cc;
        for (auto& yx : y_) {
          Matrix& y = yx[l];
          const Eigen::VectorXcd ca = y.col(ia), cb = y.col(ib);
          y.col(ia) = c * ca + s * cb;
          y.col(ib) = -std::conj(s) * ca + c * cb;
          const Eigen::RowVectorXcd ra = y.row(ia), rb = y.row(ib);
          y.row(ia) = c * ra + std::conj(s) * rb;
          y.row(ib) = -s * ra + c * rb;
        }
      }
    }
  }

  // Recompute cached norms of the two touched parts; returns the previous values.
  std::vector<double> refresh(const Move& mv) {
    std::vector<double> saved;
    const int pa = labels_[mv.k][mv.a], pb = labels_[mv.k][mv.b];
    for (std::size_t x = 0; x < xs_.size(); ++x)
      for (std::size_t l = 0; l < inc_.m_shape().num_blocks(); ++l) {
        if (inc_.multiplicity(mv.k, l) == 0) continue;
        for (int p : {pa, pb}) {
          saved.push_back(norms_[x][l][p]);
          norms_[x][l][p] = part_norm(x, l, p);
        }
      }
    return saved;
  }

  void restore(const Move& mv, const std::vector<double>& saved) {
    const int pa = labels_[mv.k][mv.a], pb = labels_[mv.k][mv.b];
    std::size_t at = 0;
    for (std::size_t x = 0; x < xs_.size(); ++x)
      for (std::size_t l = 0; l < inc_.m_shape().num_blocks(); ++l) {
        if (inc_.multiplicity(mv.k, l) == 0) continue;
        for (int p : {pa, pb}) norms_[x][l][p] = saved[at++];
      }
  }

  const std::vector<Matrix>& u() const { return u_; }

 private:
  double part_norm(std::size_t x, std::size_t l, int i) const {
    const auto& s = sets_[l][i];
    if (s.empty()) return 0.0;
    return matrix_op_norm(y_[x][l](s, s));
  }

  const Inclusion& inc_;
  int r_;
  std::vector<std::vector<int>> labels_;
  std::vector<Element> xs_;
  std::vector<double> dens_;
  std::vector<std::vector<std::vector<Eigen::Index>>> sets_;  // [l][part] indices
  std::vector<std::size_t> movable_;
  std::vector<Matrix> u_;
  std::vector<std::vector<Matrix>> y_;                   // [x][l]
  std::vector<std::vector<std::vector<double>>> norms_;  // [x][l][part]
};

}  // namespace

SearchResult pave_search(const PavingProblem& problem, const SearchConfig& cfg) {
  problem.validate();
  const AlgebraShape& ns = problem.inclusion.n_shape();
  balanced_labels(ns, cfg.r);  // granularity check
  SearchResult res;
  Annealer ann(problem, cfg.r);

  std::vector<Matrix> best_u;
  double best = std::numeric_limits<double>::infinity();
  const long sweep = std::max(1, ns.total_dim());

  for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
    ann.load(random_haar_unitary(ns, derive_seed(cfg.seed, "search-restart", static_cast<std::uint64_t>(restart))).blocks());
    double cur = ann.objective();
    if (cur < best) {
      best = cur;
      best_u = ann.u();
    }
    if (ann.empty() || !ann.movable() || (cfg.stop_at_epsilon && best <= problem.epsilon)) {
      res.incumbent_history.push_back(best);
      break;
    }
    Rng rng(derive_seed(cfg.seed, "search", static_cast<std::uint64_t>(restart)));
    const double t0 = cfg.temperature * std::max(cur, 1e-12);
    const long sweeps = std::max(1L, (cfg.steps + sweep - 1) / sweep);
    bool done = false;
    for (long sw = 0; sw < sweeps && !done; ++sw) {
      const double decay = std::pow(cfg.cooling, static_cast<double>(sw));
      const double scale = cfg.step_scale * decay;
      const double temp = t0 * decay;
      for (long p = 0; p < sweep; ++p) {
        const auto mv = ann.propose(rng, scale);
        ann.apply(mv, false);
        const auto saved = ann.refresh(mv);
        const double next = ann.objective();
        ++res.proposals;
        const bool accept = next <= cur || (temp > 0.0 && rng.uniform() < std::exp(-(next - cur) / temp));
        if (accept) {
          cur = next;
          ++res.accepted;
          if (cur < best) {
            best = cur;
            best_u = ann.u();
          }
        } else {
          ann.apply(mv, true);
          ann.restore(mv, saved);
        }
      }
      ann.resync();
      cur = ann.objective();
      if (cur < best) {
        best = cur;
        best_u = ann.u();
      }
      res.incumbent_history.push_back(best);
      if (cfg.stop_at_epsilon && best <= problem.epsilon) done = true;
    }
    if (done) break;
  }

  res.certificate = verify(rotated_partition(ns, best_u, cfg.r), problem);
  res.certificate.seed = cfg.seed;
  res.certificate.config = {{"r", cfg.r},
                            {"restarts", cfg.restarts},
                            {"steps", static_cast<double>(cfg.steps)},
                            {"step_scale", cfg.step_scale},
                            {"cooling", cfg.cooling},
                            {"temperature", cfg.temperature}};
  return res;
}

}  // namespace paving
