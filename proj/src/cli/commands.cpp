#include "paving/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paving/basis.hpp"
#include "paving/bounds.hpp"
#include "paving/dixmier.hpp"
#include "paving/freeprob.hpp"
#include "paving/index.hpp"
#include "paving/io.hpp"
#include "paving/l2.hpp"
#include "paving/pipeline.hpp"
#include "paving/scan.hpp"
#include "paving/search.hpp"

namespace paving::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string spec_path;
  std::string family;
  std::optional<double> epsilon;
  std::optional<std::string> grid;
  std::string f_random;
  std::string f_file;
  std::optional<std::uint64_t> seed;
  std::string mode = "pipeline";
  std::string out;
  std::string certificate;
  std::optional<int> trials;
  std::optional<long> budget;
  int n = 0;
  int m = 0;
  int r = 0;
  int dim = 0;
  double theta = 0.5;
  std::optional<double> index;
  double tau = 0.0;
  int defect = 0;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::uint64_t need_seed(const Options& o) {
  if (!o.seed) throw UsageError("--seed is required for randomized commands");
  return *o.seed;
}

double need_epsilon(const Options& o) {
  if (!o.epsilon) throw UsageError("--epsilon is required");
  if (!(*o.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
  return *o.epsilon;
}

InclusionSpec load_spec(const Options& o) {
  if (o.spec_path.empty() == o.family.empty()) throw UsageError("give exactly one of --spec PATH and --family NAME");
  if (!o.family.empty()) return InclusionSpec::from_family(o.family);
  json j;
  try {
    j = json::parse(io::read_file(o.spec_path));
  } catch (const json::exception& e) {
    throw SpecError(std::string("cannot parse ") + o.spec_path + ": " + e.what());
  }
  return io::inclusion_spec_from_json(j);
}

FamilySource parse_f_random(const std::string& text, std::uint64_t seed, double theta) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--f-random expects KIND:COUNT");
  FamilySource src;
  src.kind = text.substr(0, colon);
  try {
    src.count = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--f-random count is not an integer: " + text.substr(colon + 1));
  }
  if (src.count < 1) throw UsageError("--f-random count must be >= 1");
  src.seed = derive_seed(seed, "cli-family", 0);
  src.theta = theta;
  return src;
}

struct Family {
  std::vector<Element> F;
  io::CertificateContext ctx;
};

Family load_family(const Options& o, const InclusionSpec& spec, const Inclusion& inc) {
  if (o.f_random.empty() == o.f_file.empty()) throw UsageError("give exactly one of --f-random and --f-file");
  Family fam;
  fam.ctx.spec = spec;
  if (!o.f_random.empty()) {
    fam.ctx.source = parse_f_random(o.f_random, need_seed(o), o.theta);
    fam.F = generate_family(inc, *fam.ctx.source);
  } else {
    json j;
    try {
      j = json::parse(io::read_file(o.f_file));
    } catch (const json::exception& e) {
      throw MalformedElementError(std::string("cannot parse ") + o.f_file + ": " + e.what());
    }
    fam.F = io::family_from_json(j, inc.m_shape());
    fam.ctx.inline_family = fam.F;
  }
  return fam;
}

std::vector<Element> family_of(const io::CertificateContext& ctx, const Inclusion& inc) {
  return ctx.source ? generate_family(inc, *ctx.source) : ctx.inline_family;
}

void write_outputs(const Options& o, const std::string& command,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  if (o.out.empty()) return;
  const fs::path dir(o.out);
  for (const auto& [name, content] : files) io::write_atomic(dir / name, content);
  io::write_atomic(dir / "run_meta.json", io::run_meta(command, o.seed.value_or(0)).dump(2) + "\n");
}

void print_certificate(std::ostream& out, const PavingCertificate& c, const PavingProblem& problem) {
  out << "mode       " << mode_name(c.mode) << "\n";
  out << "r          " << c.r << "\n";
  out << "epsilon    " << fmt(problem.epsilon) << "\n";
  out << "index      " << fmt(problem.index) << (problem.index_exact ? " (exact)" : " (estimate)") << "\n";
  const TheoremBound tb = theorem_bound(problem.index, problem.epsilon);
  out << "theorem    n=" << tb.n << " m=" << tb.m << " r=" << tb.r << "\n";
  out << "lower      r >= " << guarded_ceil(lemma24_lower_bound(0.0, problem.epsilon)) << "\n";
  out << "element    ratio\n";
  for (std::size_t i = 0; i < c.ratios.size(); ++i) {
    char label[16];
    std::snprintf(label, sizeof label, "%-11zu", i);
    out << label << fmt(c.ratios[i], "%.9f") << "\n";
  }
  out << "max ratio  " << fmt(c.max_ratio, "%.9f") << "  threshold " << fmt(c.threshold, "%.9f") << "\n";
  for (const auto& a : c.alarms) out << "alarm      " << a << "\n";
  out << "verified   " << (c.verified ? "yes" : "no") << "\n";
}

int finish_certificate(const Options& o, std::ostream& out, const PavingCertificate& c, const PavingProblem& problem,
                       const io::CertificateContext& ctx, const std::string& command) {
  print_certificate(out, c, problem);
  write_outputs(o, command, {{"certificate.json", io::certificate_to_json(c, problem, ctx).dump(2) + "\n"}});
  return c.verified ? kExitOk : kExitUnverified;
}

int cmd_spec(const Options& o, std::ostream& out) {
  const InclusionSpec spec = load_spec(o);
  const std::string text = io::inclusion_spec_to_json(spec).dump(2) + "\n";
  out << text;
  write_outputs(o, "spec", {{"inclusion.json", text}});
  return kExitOk;
}

int cmd_index(const Options& o, std::ostream& out) {
  const InclusionSpec spec = load_spec(o);
  const Inclusion inc = Inclusion::build(spec);
  const int trials = o.trials.value_or(2000);
  if (trials < 1) throw UsageError("--trials must be >= 1");
  const IndexEstimate est = pp_index_estimate(inc, trials, need_seed(o));
  out << "lambda     " << fmt(est.lambda, "%.12g") << "\n";
  out << "index      " << fmt(est.index, "%.12g") << "\n";
  if (est.exact) out << "exact      " << fmt(*est.exact, "%.12g") << "\n";
  out << "trials     " << est.trials << "\n";
  out << "min seed   " << est.min_seed << "\n";
  json j = {{"lambda", est.lambda}, {"index", est.index}, {"trials", est.trials}, {"min_seed", est.min_seed},
            {"amplification", est.amplification}, {"regularized", est.regularized}};
  if (est.exact) j["exact"] = *est.exact;
  write_outputs(o, "index", {{"index.json", j.dump(2) + "\n"}});
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (o.certificate.empty()) throw UsageError("--mode verify needs --certificate PATH");
  json j;
  try {
    j = json::parse(io::read_file(o.certificate));
  } catch (const json::exception& e) {
    throw SpecError(std::string("cannot parse ") + o.certificate + ": " + e.what());
  }
  const io::LoadedCertificate loaded = io::certificate_from_json(j);
  const Inclusion inc = Inclusion::build(loaded.context.spec);
  PavingProblem problem{inc, family_of(loaded.context, inc), loaded.epsilon, loaded.index, loaded.index_exact};
  problem.validate();
  const PavingCertificate& stored = loaded.certificate;
  PavingCertificate fresh;
  switch (stored.mode) {
    case CertificateMode::partition:
      fresh = verify(stored.partition, problem);
      break;
    case CertificateMode::unitaries:
      fresh = verify_unitaries(stored.unitaries, problem);
      break;
    case CertificateMode::l2: {
      double delta = 0.05;
      for (const auto& [k, v] : stored.config)
        if (k == "delta_l2") delta = v;
      fresh = verify_l2(stored.partition, problem, delta);
      break;
    }
  }
  const bool same = fresh.ratios == stored.ratios;
  print_certificate(out, fresh, problem);
  out << "reproduced " << (same ? "yes" : "no") << "\n";
  return fresh.verified && same ? kExitOk : kExitUnverified;
}

int cmd_pave(const Options& o, std::ostream& out) {
  if (o.mode == "verify") return cmd_verify(o, out);
  const InclusionSpec spec = load_spec(o);
  const Inclusion inc = Inclusion::build(spec);
  const double eps = need_epsilon(o);
  Family fam = load_family(o, spec, inc);
  const std::uint64_t seed = need_seed(o);
  PavingProblem problem = make_problem(inc, fam.F, eps, o.index, derive_seed(seed, "cli-index", 0));

  if (eps >= 1.0 && o.mode != "l2") {
    const PavingCertificate c = trivial_certificate(problem);
    return finish_certificate(o, out, c, problem, fam.ctx, "pave");
  }
  if (o.mode == "pipeline") {
    PipelineConfig cfg;
    cfg.n = o.n;
    cfg.m = o.m;
    cfg.seed = seed;
    if (o.budget) cfg.retry_budget = static_cast<int>(*o.budget);
    const PipelineResult res = pave_constructive(problem, cfg);
    out << "pipeline   n=" << res.n << " m=" << res.m << " attempts=" << res.attempts
        << (res.fallback ? " fallback" : "") << "\n";
    out << "final bd   " << fmt(res.final_bound, "%.9f") << "\n";
    return finish_certificate(o, out, res.certificate, problem, fam.ctx, "pave");
  }
  if (o.mode == "search") {
    SearchConfig cfg;
    cfg.r = o.r > 0 ? o.r : 2;
    cfg.seed = seed;
    if (o.budget) cfg.steps = *o.budget;
    const SearchResult res = pave_search(problem, cfg);
    return finish_certificate(o, out, res.certificate, problem, fam.ctx, "pave");
  }
  if (o.mode == "unitary") {
    DixmierConfig cfg;
    cfg.seed = seed;
    if (o.budget) cfg.max_steps = static_cast<int>(*o.budget);
    const DixmierResult res = dixmier_average_run(problem, cfg);
    return finish_certificate(o, out, res.certificate, problem, fam.ctx, "pave");
  }
  if (o.mode == "l2") {
    int n = o.n;
    if (n <= 0) {
      const L2SizeEstimate est = l2_paving_size(problem, seed, inc.n_shape().total_dim());
      if (est.n == 0) {
        out << "l2 size    none up to " << est.max_ratio.size() << "\n";
        return kExitUnverified;
      }
      out << "l2 size    " << est.n << "\n";
      n = est.n;
      const PavingCertificate c = l2_pave(problem, n, derive_seed(seed, "l2", static_cast<std::uint64_t>(n)));
      return finish_certificate(o, out, c, problem, fam.ctx, "pave");
    }
    const PavingCertificate c = l2_pave(problem, n, seed);
    return finish_certificate(o, out, c, problem, fam.ctx, "pave");
  }
  throw UsageError("unknown --mode " + o.mode + " (pipeline|search|verify|unitary|l2)");
}

int cmd_dixmier(const Options& o, std::ostream& out) {
  const InclusionSpec spec = load_spec(o);
  const Inclusion inc = Inclusion::build(spec);
  const double eps = need_epsilon(o);
  if (eps >= 1.0) throw UsageError("dixmier needs 0 < epsilon < 1");
  Family fam = load_family(o, spec, inc);
  const std::uint64_t seed = need_seed(o);
  const PavingProblem problem = make_problem(inc, fam.F, eps, o.index, derive_seed(seed, "cli-index", 0));
  DixmierConfig cfg;
  cfg.seed = seed;
  if (o.budget) cfg.max_steps = static_cast<int>(*o.budget);
  const DixmierResult res = dixmier_average_run(problem, cfg);
  const long bound = dixmier_count_bound(eps);
  out << "count      " << res.certificate.r << "  bound " << bound << "\n";
  out << "folds      " << res.folds << "  haar steps " << res.haar_steps << (res.stalled ? "  stalled" : "") << "\n";
  for (std::size_t s = 0; s < res.history.size(); ++s)
    out << "step " << s << "     " << fmt(res.history[s], "%.9f") << "\n";
  out << "verified   " << (res.certificate.verified ? "yes" : "no") << "\n";
  const json summary = {{"count", res.certificate.r}, {"bound", bound}, {"history", res.history},
                        {"folds", res.folds}, {"haar_steps", res.haar_steps}, {"stalled", res.stalled},
                        {"max_ratio", res.certificate.max_ratio}, {"verified", res.certificate.verified}};
  write_outputs(o, "dixmier",
                {{"dixmier.json", summary.dump(2) + "\n"},
                 {"certificate.json", io::certificate_to_json(res.certificate, problem, fam.ctx).dump(2) + "\n"}});
  return res.certificate.verified && static_cast<long>(res.certificate.r) <= bound ? kExitOk : kExitUnverified;
}

int cmd_basis(const Options& o, std::ostream& out) {
  const InclusionSpec spec = load_spec(o);
  const Inclusion inc = Inclusion::build(spec);
  const OrthonormalBasis basis = orthonormal_basis(inc);
  double index = 0.0;
  bool exact = false;
  if (o.index) {
    index = *o.index;
  } else if (auto e = inc.exact_index()) {
    index = *e;
    exact = true;
  } else {
    index = pp_index_estimate(inc, o.trials.value_or(2000), need_seed(o)).index;
  }
  const DobReport rep = d_ob(inc, basis, index, exact);
  const double ortho = orthonormality_residual(inc, basis);
  const bool inside = rep.value >= rep.lower - 1e-8 && rep.value <= rep.upper + 1e-8;
  out << "d_ob       " << fmt(rep.value, "%.12g") << "\n";
  out << "interval   [" << fmt(rep.lower, "%.12g") << ", " << fmt(rep.upper, "%.12g") << "]"
      << (inside ? "" : "  VIOLATED") << "\n";
  out << "basis      " << rep.basis_size << " elements, " << basis.dropped << " dropped\n";
  out << "ortho res  " << fmt(ortho, "%.3e") << "\n";
  const bool jones = jones_projection(inc).has_value();
  out << "jones e    " << (jones ? "available" : "not representable") << "\n";
  const json j = {{"d_ob", rep.value}, {"lower", rep.lower}, {"upper", rep.upper}, {"index", rep.index},
                  {"index_exact", rep.index_exact}, {"basis_size", rep.basis_size}, {"dropped", basis.dropped},
                  {"all_but_one_full", rep.all_but_one_full}, {"orthonormality_residual", ortho},
                  {"jones_projection", jones}};
  write_outputs(o, "basis", {{"basis.json", j.dump(2) + "\n"}});
  return inside ? kExitOk : kExitUnverified;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad grid entry \"" + item + "\"");
    }
  }
  return grid;
}

int cmd_scan(const Options& o, std::ostream& out) {
  if (!o.grid) throw UsageError("scan needs --grid \"a,b,c\"");
  ScanConfig cfg;
  cfg.grid = parse_grid(*o.grid);
  if (cfg.grid.empty()) throw UsageError("the epsilon grid is empty");
  const InclusionSpec spec = load_spec(o);
  const Inclusion inc = Inclusion::build(spec);
  Family fam = load_family(o, spec, inc);
  const std::uint64_t seed = need_seed(o);
  cfg.seed = seed;
  cfg.tau = o.tau;
  cfg.r_max = o.r;
  if (o.budget) cfg.steps = *o.budget;
  const PavingProblem problem = make_problem(inc, fam.F, cfg.grid.front(), o.index, derive_seed(seed, "cli-index", 0));
  const std::vector<ScanRow> rows = scan(problem, cfg);
  const std::string csv = io::scan_csv(rows);
  out << csv;
  write_outputs(o, "scan", {{"scan.csv", csv}});
  bool all = true;
  for (const ScanRow& r : rows) all = all && r.r_verified;
  return all ? kExitOk : kExitUnverified;
}

int cmd_kesten(const Options& o, std::ostream& out) {
  KestenExperiment exp;
  exp.n = o.n > 0 ? o.n : 2;
  exp.dim = o.dim > 0 ? o.dim : std::lcm(exp.n, 512);
  exp.trials = o.trials.value_or(20);
  exp.seed = need_seed(o);
  exp.defect_word_len = o.defect;
  const KestenResult res = run_kesten(exp);
  const std::string csv = io::kesten_csv(res);
  const json summary = io::kesten_summary(res);
  out << "n          " << exp.n << "  dim " << exp.dim << "  trials " << exp.trials << "\n";
  out << "bound      " << fmt(res.bound, "%.9f") << "\n";
  out << "max        " << fmt(res.max, "%.9f") << "\n";
  out << "mean       " << fmt(res.mean, "%.9f") << "\n";
  out << "exceed     " << res.exceedances << "\n";
  write_outputs(o, "kesten", {{"kesten.csv", csv}, {"kesten_summary.json", summary.dump(2) + "\n"}});
  return res.exceedances == 0 ? kExitOk : kExitUnverified;
}

void add_inclusion_options(CLI::App* app, Options& o) {
  app->add_option("--spec", o.spec_path, "Inclusion spec JSON file");
  app->add_option("--family", o.family, "Builtin family: tensor(k,d), scalars-in(n), factor(n)");
}

void add_family_options(CLI::App* app, Options& o) {
  app->add_option("--f-random", o.f_random, "Random family KIND:COUNT (selfadjoint|positive|projection|contraction|jones)");
  app->add_option("--f-file", o.f_file, "Family JSON file {\"elements\": [...]}");
  app->add_option("--theta", o.theta, "Trace of projection-kind elements");
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Root seed");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--index", o.index, "Index override");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Paving partitions and averaging certificates for finite-dimensional inclusions", "paving"};
  app.require_subcommand(1);
  Options o;

  CLI::App* spec = app.add_subcommand("spec", "Validate an inclusion spec and print it with normalized weights");
  add_inclusion_options(spec, o);
  spec->add_option("--out", o.out, "Output directory");

  CLI::App* index = app.add_subcommand("index", "Pimsner-Popa index estimate");
  add_inclusion_options(index, o);
  add_common(index, o);
  index->add_option("--trials", o.trials, "Samples (default 2000)");

  CLI::App* pave = app.add_subcommand("pave", "Build and verify a paving certificate");
  add_inclusion_options(pave, o);
  add_family_options(pave, o);
  add_common(pave, o);
  pave->add_option("--epsilon", o.epsilon, "Target ratio");
  pave->add_option("--mode", o.mode, "pipeline|search|verify|unitary|l2");
  pave->add_option("--certificate", o.certificate, "Certificate to re-verify (verify mode)");
  pave->add_option("--budget", o.budget, "Retries (pipeline), proposals (search) or steps (unitary)");
  pave->add_option("--n", o.n, "Outer partition size (pipeline) or l2 partition size");
  pave->add_option("--m", o.m, "Refinement size (pipeline)");
  pave->add_option("--r", o.r, "Partition size (search)");

  CLI::App* dix = app.add_subcommand("dixmier", "Dixmier averaging run with count against its bound");
  add_inclusion_options(dix, o);
  add_family_options(dix, o);
  add_common(dix, o);
  dix->add_option("--epsilon", o.epsilon, "Target ratio");
  dix->add_option("--budget", o.budget, "Maximum doubling steps");

  CLI::App* basis = app.add_subcommand("basis", "Orthonormal basis and d_ob with its interval");
  add_inclusion_options(basis, o);
  add_common(basis, o);
  basis->add_option("--trials", o.trials, "Index estimate samples when the index is not exact");

  CLI::App* scn = app.add_subcommand("scan", "Smallest verified r over an epsilon grid");
  add_inclusion_options(scn, o);
  add_family_options(scn, o);
  add_common(scn, o);
  scn->add_option("--grid", o.grid, "Comma separated epsilons");
  scn->add_option("--budget", o.budget, "Proposals per restart");
  scn->add_option("--r", o.r, "Largest r to try");
  scn->add_option("--tau", o.tau, "tau in the lower bound (tau + eps)^-1");

  CLI::App* kes = app.add_subcommand("kesten", "Random-matrix pinching norms against 2 sqrt(n-1)/n");
  kes->add_option("--n", o.n, "Order of the cyclic unitary");
  kes->add_option("--dim", o.dim, "Matrix size (default lcm(n, 512))");
  kes->add_option("--trials", o.trials, "Trials (default 20)");
  kes->add_option("--defect", o.defect, "Longest word for the freeness defect (0 skips)");
  kes->add_option("--seed", o.seed, "Root seed");
  kes->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "paving: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (spec->parsed()) return cmd_spec(o, out);
    if (index->parsed()) return cmd_index(o, out);
    if (pave->parsed()) return cmd_pave(o, out);
    if (dix->parsed()) return cmd_dixmier(o, out);
    if (basis->parsed()) return cmd_basis(o, out);
    if (scn->parsed()) return cmd_scan(o, out);
    if (kes->parsed()) return cmd_kesten(o, out);
  } catch (const UsageError& e) {
    err << "paving: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "paving: infeasible: " << e.what();
    if (e.nearest()) err << " (nearest realizable " << *e.nearest() << ")";
    err << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "paving: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "paving: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace paving::cli
