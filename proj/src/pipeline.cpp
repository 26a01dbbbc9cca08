#include "paving/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "paving/bounds.hpp"
#include "paving/lemma13.hpp"

namespace paving {

namespace {

// Orthonormal basis of the column span of s.
Matrix orth(const Matrix& s) {
  if (s.cols() == 0) return Matrix(s.rows(), 0);
  Matrix gram = s.adjoint() * s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()));
  const double top = std::max(0.0, es.eigenvalues().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-10 * std::max(1.0, top)) keep.push_back(i);
  Matrix f(s.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    f.col(static_cast<Eigen::Index>(j)) = s * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
  if (f.cols() == 0) return f;
  Eigen::HouseholderQR<Matrix> qr(f);
  return qr.householderQ() * Matrix::Identity(f.rows(), f.cols());
}

Matrix hcat(const std::vector<Matrix>& pieces, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& p : pieces) cols += p.cols();
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : pieces) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

double lambda_min(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// One outer part p_i in its compressed coordinates.
struct OuterPart {
  std::vector<Matrix> n_frame;   // per N block: n_k x D_ik
  std::vector<Matrix> w;         // per M block: embedded frame, m_l x sum_k D_ik lambda_kl
  std::vector<Matrix> q;         // per M block: frame of q_i inside the compressed space
  std::vector<std::vector<Matrix>> c;  // [x][l] compression W* x W
  std::vector<Matrix> support;   // per N block: frame of the common support inside p_i's N range
  std::vector<std::vector<Matrix>> refine;  // [j][k] frames inside p_i's N range
  double q_trace = 0.0;
};

// Frame of q^i_j inside M block l's compressed coordinates.
Matrix compressed_part(const Inclusion& inc, const OuterPart& op, const std::vector<Matrix>& g, std::size_t l) {
  const std::size_t nk = inc.n_shape().num_blocks();
  Eigen::Index rows = 0, cols = 0;
  for (std::size_t k = 0; k < nk; ++k) {
    rows += op.n_frame[k].cols() * inc.multiplicity(k, l);
    cols += g[k].cols() * inc.multiplicity(k, l);
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r0 = 0, c0 = 0;
  for (std::size_t k = 0; k < nk; ++k) {
    const int mult = inc.multiplicity(k, l);
    for (Eigen::Index a = 0; a < g[k].rows(); ++a)
      for (Eigen::Index j = 0; j < g[k].cols(); ++j)
        for (int c = 0; c < mult; ++c) out(r0 + a * mult + c, c0 + j * mult + c) = g[k](a, j);
    r0 += g[k].rows() * mult;
    c0 += g[k].cols() * mult;
  }
  return out;
}

// max_j ||Q_j* y Q_j||
double pinched_norm(const std::vector<Matrix>& parts, const Matrix& y) {
  double n = 0.0;
  for (const auto& q : parts)
    if (q.cols() > 0) n = std::max(n, matrix_op_norm(q.adjoint() * y * q));
  return n;
}

// min_j lambda_min(Q_j* z* z Q_j - (Q_j* z Q_j)* (Q_j* z Q_j))
double kadison_gap(const std::vector<Matrix>& parts, const Matrix& z) {
  double g = std::numeric_limits<double>::infinity();
  const Matrix zz = z.adjoint() * z;
  for (const auto& q : parts) {
    if (q.cols() == 0) continue;
    const Matrix pz = q.adjoint() * z * q;
    g = std::min(g, lambda_min(q.adjoint() * zz * q - pz.adjoint() * pz));
  }
  return std::isfinite(g) ? g : 0.0;
}

}  // namespace

PipelineResult pave_constructive(const PavingProblem& problem, const PipelineConfig& cfg) {
  problem.validate();
  const Inclusion& inc = problem.inclusion;
  const AlgebraShape& ns = inc.n_shape();
  const AlgebraShape& ms = inc.m_shape();
  PipelineResult res;

  auto trivial = [&](const char* why) {
    res.certificate = trivial_certificate(problem);
    res.certificate.seed = cfg.seed;
    res.certificate.notes.push_back(why);
    res.n = res.m = 1;
    return res;
  };
  if (problem.epsilon >= 1.0) return trivial("epsilon >= 1: the trivial partition paves");
  const std::vector<Element> F = normalize_family(inc, problem.F);
  if (F.empty()) return trivial("every element lies in the relative commutant");

  const TheoremBound tb = theorem_bound(problem.index, problem.epsilon);
  const int n = cfg.n > 0 ? cfg.n : static_cast<int>(tb.n);
  const int m = cfg.m > 0 ? cfg.m : static_cast<int>(tb.m);
  const double dp = cfg.delta_prime >= 0.0 ? cfg.delta_prime : 2.0 / (static_cast<double>(n) * n);
  if (!(dp < 4.0 / (static_cast<double>(n) * n)))
    throw PreconditionError("pipeline: delta' must be below 4/n^2", dp - 4.0 / (static_cast<double>(n) * n));
  const double thr = 4.0 * (n - 1) / (static_cast<double>(n) * n) + dp;
  const double budget = cfg.trace_budget >= 0.0
                            ? cfg.trace_budget
                            : std::pow(problem.epsilon / (4.0 * problem.index * static_cast<double>(F.size())), 2.0);
  res.n = n;
  res.m = m;
  res.delta_prime = dp;
  res.threshold = thr;
  res.trace_budget = budget;
  res.final_bound = std::sqrt(thr) + std::sqrt(problem.index / m);

  {
    const auto labels = balanced_labels(ns, n);
    std::vector<int> sizes(n, 0);
    for (const auto& blk : labels)
      for (int v : blk) ++sizes[v];
    const int smallest = *std::min_element(sizes.begin(), sizes.end());
    if (smallest < m) {
      std::ostringstream os;
      os << "pipeline: an outer part has " << smallest << " minimal projections of N, fewer than m = " << m;
      throw ResourceError(os.str());
    }
  }

  std::vector<OuterPart> parts;
  for (int attempt = 0; attempt <= cfg.retry_budget; ++attempt) {
    const bool last = attempt == cfg.retry_budget;
    res.attempts = attempt + 1;
    const Element u = random_haar_unitary(ns, derive_seed(cfg.seed, "pipeline-u", static_cast<std::uint64_t>(attempt)));
    const PartitionOfUnity outer = rotated_partition(ns, u.blocks(), n);
    parts.assign(n, OuterPart{});
    bool over_budget = false;
    res.boundary_warning = false;
    res.max_q_trace = 0.0;

    // Exceptional projections.
    for (int i = 0; i < n; ++i) {
      OuterPart& op = parts[i];
      op.n_frame = outer.part(i).frame();
      op.c.assign(F.size(), {});
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        std::vector<Matrix> pieces;
        for (std::size_t k = 0; k < ns.num_blocks(); ++k)
          if (inc.multiplicity(k, l) > 0) pieces.push_back(inc.embed_frame(op.n_frame[k], k, l));
        op.w.push_back(hcat(pieces, ms.dim(l)));
      }
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        std::vector<Matrix> exceptional;
        for (std::size_t xi = 0; xi < F.size(); ++xi) {
          const Matrix& w = op.w[l];
          Matrix c = w.adjoint() * F[xi].block(l) * w;
          Matrix h = c.adjoint() * c;
          if (h.rows() > 0) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
            for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) {
              const double lam = es.eigenvalues()(e);
              if (std::abs(lam - thr) <= kBoundaryWindow) res.boundary_warning = true;
              if (lam >= thr - kBoundaryWindow) exceptional.push_back(es.eigenvectors().col(e));
            }
          }
          op.c[xi].push_back(std::move(c));
        }
        op.q.push_back(orth(hcat(exceptional, op.w[l].cols())));
        op.q_trace += ms.weight(l) * static_cast<double>(op.q.back().cols());
      }
      res.max_q_trace = std::max(res.max_q_trace, op.q_trace);
      if (op.q_trace > budget) over_budget = true;
    }
    if (over_budget && !last) {
      std::ostringstream os;
      os << "attempt " << attempt << ": tau(q_i) = " << res.max_q_trace << " exceeds the budget " << budget;
      res.attempt_log.push_back(os.str());
      continue;
    }

    // Supports of E_N(b_{i,x}) inside each p_i.
    for (int i = 0; i < n; ++i) {
      OuterPart& op = parts[i];
      std::vector<std::vector<Matrix>> cols(ns.num_blocks());
      if (op.q_trace > 0.0 && !over_budget) {
        for (std::size_t xi = 0; xi < F.size(); ++xi) {
          std::vector<Matrix> bm;
          for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
            const Matrix qq = op.q[l] * op.q[l].adjoint();
            const Matrix b = qq * op.c[xi][l].adjoint() * op.c[xi][l] * qq;
            bm.push_back(op.w[l] * b * op.w[l].adjoint());
          }
          const Element en = inc.cond_exp_n_coords(Element(ms, std::move(bm)));
          for (std::size_t k = 0; k < ns.num_blocks(); ++k) {
            if (op.n_frame[k].cols() == 0) continue;
            Matrix g = op.n_frame[k].adjoint() * en.block(k) * op.n_frame[k];
            g = 0.5 * (g + g.adjoint());
            Eigen::SelfAdjointEigenSolver<Matrix> es(g);
            const double top = std::max(0.0, es.eigenvalues().maxCoeff());
            for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e)
              if (top > 0.0 && es.eigenvalues()(e) > 1e-9 * top) cols[k].push_back(es.eigenvectors().col(e));
          }
        }
      }
      op.support.clear();
      for (std::size_t k = 0; k < ns.num_blocks(); ++k) op.support.push_back(orth(hcat(cols[k], op.n_frame[k].cols())));
    }

    // Small-support refinement of each p_i.
    bool infeasible = false;
    std::string why;
    for (int i = 0; i < n && !infeasible; ++i) {
      OuterPart& op = parts[i];
      std::vector<int> dims;
      for (const auto& f : op.n_frame) dims.push_back(static_cast<int>(f.cols()));
      Rng rng(derive_seed(cfg.seed, "pipeline-refine", static_cast<std::uint64_t>(attempt) * 1000003ULL + i));
      try {
        op.refine = cyclic_refinement(dims, op.support, m, rng);
      } catch (const InfeasibleError& e) {
        infeasible = true;
        why = e.what();
      }
    }
    if (infeasible && !last) {
      res.attempt_log.push_back("attempt " + std::to_string(attempt) + ": " + why);
      continue;
    }
    if (over_budget || infeasible) {
      res.fallback = true;
      res.attempt_log.push_back("attempt " + std::to_string(attempt) +
                                ": retries exhausted; refining without the support constraint");
      for (int i = 0; i < n; ++i) {
        OuterPart& op = parts[i];
        std::vector<int> dims;
        std::vector<Matrix> empty;
        for (const auto& f : op.n_frame) {
          dims.push_back(static_cast<int>(f.cols()));
          empty.push_back(Matrix(f.cols(), 0));
        }
        Rng rng(derive_seed(cfg.seed, "pipeline-fallback", static_cast<std::uint64_t>(i)));
        op.refine = cyclic_refinement(dims, empty, m, rng);
      }
    }
    res.attempt_log.push_back("attempt " + std::to_string(attempt) + ": accepted");
    break;
  }

  // Final partition {q^i_j} of N.
  std::vector<Projection> final_parts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      std::vector<Matrix> frame;
      for (std::size_t k = 0; k < ns.num_blocks(); ++k) frame.push_back(parts[i].n_frame[k] * parts[i].refine[j][k]);
      final_parts.push_back(Projection::from_frame(ns, std::move(frame)));
    }
  const PartitionOfUnity partition(std::move(final_parts));

  // Stage checks.
  res.kadison_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const OuterPart& op = parts[i];
    std::vector<std::vector<Matrix>> qj(ms.num_blocks());  // [l][j] compressed frames
    for (std::size_t l = 0; l < ms.num_blocks(); ++l)
      for (int j = 0; j < m; ++j) qj[l].push_back(compressed_part(inc, op, op.refine[j], l));

    Rng rng(derive_seed(cfg.seed, "pipeline-kadison", static_cast<std::uint64_t>(i)));
    for (int s = 0; s < cfg.kadison_samples; ++s)
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        const Eigen::Index d = op.w[l].cols();
        if (d == 0) continue;
        Matrix y = rng.ginibre(d, d);
        y /= std::max(1e-300, matrix_op_norm(y));
        res.kadison_min = std::min(res.kadison_min, kadison_gap(qj[l], y));
      }

    for (std::size_t xi = 0; xi < F.size(); ++xi) {
      StageRecord rec;
      rec.part = i;
      rec.element = static_cast<int>(xi);
      rec.q_trace = op.q_trace;
      rec.off_q_bound = std::sqrt(thr);
      rec.refined_bound = 1.0 / m;
      rec.support_bound = problem.index * op.q_trace;
      rec.kadison_residual = std::numeric_limits<double>::infinity();
      double phi_b = 0.0;
      std::vector<Matrix> bm;
      for (std::size_t l = 0; l < ms.num_blocks(); ++l) {
        const Matrix& c = op.c[xi][l];
        const Matrix qq = op.q[l] * op.q[l].adjoint();
        const Matrix rest = Matrix::Identity(qq.rows(), qq.cols()) - qq;
        const Matrix z = c * qq;  // p_i x q_i
        const Matrix b = z.adjoint() * z;
        rec.off_q_norm = std::max(rec.off_q_norm, matrix_op_norm(c * rest));
        rec.term_a = std::max(rec.term_a, pinched_norm(qj[l], c * rest));
        rec.term_b = std::max(rec.term_b, pinched_norm(qj[l], z));
        rec.kadison_residual = std::min(rec.kadison_residual, kadison_gap(qj[l], z));
        phi_b = std::max(phi_b, pinched_norm(qj[l], b));
        if (op.q_trace > 0.0) bm.push_back(op.w[l] * b * op.w[l].adjoint());
      }
      double phi_en = 0.0;
      const Element en = op.q_trace > 0.0 ? inc.cond_exp_n_coords(Element(ms, std::move(bm))) : Element::zero(ns);
      for (std::size_t k = 0; k < ns.num_blocks() && op.q_trace > 0.0; ++k) {
        if (op.n_frame[k].cols() == 0) continue;
        Matrix g = op.n_frame[k].adjoint() * en.block(k) * op.n_frame[k];
        g = 0.5 * (g + g.adjoint());
        std::vector<Matrix> gj;
        for (int j = 0; j < m; ++j) gj.push_back(op.refine[j][k]);
        phi_en = std::max(phi_en, pinched_norm(gj, g));
        Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
        const double top = std::max(0.0, es.eigenvalues().maxCoeff());
        for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e)
          if (top > 0.0 && es.eigenvalues()(e) > 1e-9 * top) rec.support_trace += ns.weight(k);
      }
      rec.refined_value = phi_en;
      rec.pp_residual = problem.index * phi_en - phi_b;
      if (!std::isfinite(rec.kadison_residual)) rec.kadison_residual = 0.0;
      res.stages.push_back(rec);
    }
  }
  if (!std::isfinite(res.kadison_min)) res.kadison_min = 0.0;

  res.certificate = verify(partition, problem);
  res.certificate.seed = cfg.seed;
  res.certificate.config = {{"n", n},
                            {"m", m},
                            {"delta_prime", dp},
                            {"threshold", thr},
                            {"trace_budget", budget},
                            {"retry_budget", cfg.retry_budget},
                            {"attempts", res.attempts},
                            {"index", problem.index}};
  if (res.fallback) res.certificate.notes.push_back("retries exhausted; support constraint dropped");
  if (res.boundary_warning) res.certificate.notes.push_back("eigenvalue within 1e-12 of the spectral threshold");
  return res;
}

}  // namespace paving
