#include "paving/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace paving::io {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SpecError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

CertificateMode mode_from_name(const std::string& s) {
  if (s == "partition") return CertificateMode::partition;
  if (s == "unitaries") return CertificateMode::unitaries;
  if (s == "l2") return CertificateMode::l2;
  throw SpecError("unknown certificate mode \"" + s + "\"");
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw MalformedElementError("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw MalformedElementError("ragged matrix: row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw MalformedElementError("matrix entries must be [re, im] pairs");
      m(i, c) = complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json shape_to_json(const AlgebraShape& s) {
  return {{"block_dims", s.block_dims()}, {"trace_weights", s.trace_weights()}};
}

AlgebraShape shape_from_json(const json& j) {
  try {
    return AlgebraShape(j.at("block_dims").get<std::vector<int>>(), j.at("trace_weights").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw MalformedElementError(std::string("bad shape: ") + e.what());
  }
}

json element_to_json(const Element& x) {
  json blocks = json::array();
  for (const Matrix& b : x.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"version", kFormatVersion}, {"shape", shape_to_json(x.shape())}, {"blocks", std::move(blocks)}};
}

Element element_from_json(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("blocks"))
    throw MalformedElementError("element needs \"shape\" and \"blocks\"");
  AlgebraShape shape = shape_from_json(j.at("shape"));
  std::vector<Matrix> blocks;
  for (const json& b : j.at("blocks")) blocks.push_back(matrix_from_json(b));
  return Element(std::move(shape), std::move(blocks));
}

json inclusion_spec_to_json(const InclusionSpec& spec) {
  return {{"n_blocks", spec.n_shape.block_dims()},
          {"n_weights", spec.n_shape.trace_weights()},
          {"m_blocks", spec.m_shape.block_dims()},
          {"m_weights", spec.m_shape.trace_weights()},
          {"lambda", spec.lambda}};
}

InclusionSpec inclusion_spec_from_json(const json& j) {
  InclusionSpec spec;
  try {
    spec.n_shape = AlgebraShape::normalized(require(j, "n_blocks").get<std::vector<int>>(),
                                            require(j, "n_weights").get<std::vector<double>>());
    spec.m_shape = AlgebraShape::normalized(require(j, "m_blocks").get<std::vector<int>>(),
                                            require(j, "m_weights").get<std::vector<double>>());
    spec.lambda = require(j, "lambda").get<std::vector<std::vector<int>>>();
  } catch (const json::exception& e) {
    throw SpecError(std::string("bad inclusion spec: ") + e.what());
  } catch (const PreconditionError& e) {
    throw SpecError(std::string("bad inclusion spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json family_source_to_json(const FamilySource& src) {
  return {{"kind", src.kind}, {"count", src.count}, {"seed", src.seed}, {"theta", src.theta}};
}

FamilySource family_source_from_json(const json& j) {
  FamilySource src;
  src.kind = require(j, "kind").get<std::string>();
  src.count = require(j, "count").get<int>();
  src.seed = require(j, "seed").get<std::uint64_t>();
  src.theta = j.value("theta", 0.5);
  return src;
}

std::vector<Element> family_from_json(const json& j, const AlgebraShape& m_shape) {
  const json& arr = j.is_array() ? j : require(j, "elements");
  std::vector<Element> F;
  for (const json& e : arr) {
    Element x = element_from_json(e);
    if (!(x.shape() == m_shape)) throw MalformedElementError("family element does not live in M");
    F.push_back(std::move(x));
  }
  return F;
}

json partition_to_json(const PartitionOfUnity& p) {
  json parts = json::array();
  for (const Projection& q : p.parts()) {
    json frames = json::array();
    for (const Matrix& f : q.frame()) frames.push_back(matrix_to_json(f));
    parts.push_back(std::move(frames));
  }
  return parts;
}

PartitionOfUnity partition_from_json(const json& j, const AlgebraShape& shape) {
  std::vector<Projection> parts;
  for (const json& frames : j) {
    std::vector<Matrix> f;
    std::size_t k = 0;
    for (const json& m : frames) {
      Matrix frame = matrix_from_json(m);
      if (k >= shape.num_blocks()) throw MalformedElementError("partition part has too many blocks");
      if (frame.rows() == 0) frame.resize(shape.dim(k), 0);
      f.push_back(std::move(frame));
      ++k;
    }
    parts.push_back(Projection::from_frame(shape, std::move(f)));
  }
  return PartitionOfUnity(std::move(parts));
}

json certificate_to_json(const PavingCertificate& c, const PavingProblem& problem, const CertificateContext& ctx) {
  json j;
  j["version"] = kFormatVersion;
  j["mode"] = mode_name(c.mode);
  j["inclusion"] = inclusion_spec_to_json(ctx.spec);
  if (ctx.source) {
    j["family"] = family_source_to_json(*ctx.source);
  } else {
    json els = json::array();
    for (const Element& x : ctx.inline_family) els.push_back(element_to_json(x));
    j["family"] = {{"elements", std::move(els)}};
  }
  j["epsilon"] = problem.epsilon;
  j["index"] = problem.index;
  j["index_exact"] = problem.index_exact;
  j["r"] = c.r;
  j["ratios"] = c.ratios;
  j["max_ratio"] = c.max_ratio;
  j["threshold"] = c.threshold;
  j["verified"] = c.verified;
  j["soundness_alarm"] = c.soundness_alarm;
  j["alarms"] = c.alarms;
  j["seed"] = c.seed;
  json cfg = json::object();
  for (const auto& [k, v] : c.config) cfg[k] = v;
  j["config"] = std::move(cfg);
  j["notes"] = c.notes;
  if (c.mode == CertificateMode::unitaries) {
    json us = json::array();
    for (const Element& u : c.unitaries) us.push_back(element_to_json(u));
    j["unitaries"] = std::move(us);
  } else {
    j["partition"] = partition_to_json(c.partition);
  }
  return j;
}

LoadedCertificate certificate_from_json(const json& j) {
  LoadedCertificate out;
  try {
    out.context.spec = inclusion_spec_from_json(require(j, "inclusion"));
    const json& fam = require(j, "family");
    if (fam.contains("elements"))
      out.context.inline_family = family_from_json(fam, out.context.spec.m_shape);
    else
      out.context.source = family_source_from_json(fam);
    out.epsilon = require(j, "epsilon").get<double>();
    out.index = require(j, "index").get<double>();
    out.index_exact = require(j, "index_exact").get<bool>();
    PavingCertificate& c = out.certificate;
    c.mode = mode_from_name(require(j, "mode").get<std::string>());
    c.r = require(j, "r").get<std::size_t>();
    c.ratios = require(j, "ratios").get<std::vector<double>>();
    c.max_ratio = require(j, "max_ratio").get<double>();
    c.threshold = require(j, "threshold").get<double>();
    c.verified = require(j, "verified").get<bool>();
    c.soundness_alarm = j.value("soundness_alarm", false);
    c.alarms = j.value("alarms", std::vector<std::string>{});
    c.seed = j.value("seed", std::uint64_t{0});
    c.epsilon = out.epsilon;
    const json cfg = j.value("config", json::object());
    for (const auto& [k, v] : cfg.items()) c.config.emplace_back(k, v.get<double>());
    c.notes = j.value("notes", std::vector<std::string>{});
    if (c.mode == CertificateMode::unitaries) {
      for (const json& u : require(j, "unitaries")) c.unitaries.push_back(element_from_json(u));
    } else {
      c.partition = partition_from_json(require(j, "partition"), out.context.spec.n_shape);
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("bad certificate: ") + e.what());
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "epsilon,r_found,r_verified,theorem_r,lower_bound,seed\n";
  for (const ScanRow& r : rows)
    os << format_double(r.epsilon) << ',' << r.r_found << ',' << (r.r_verified ? 1 : 0) << ',' << r.theorem_r << ','
       << r.lower_bound << ',' << r.seed << '\n';
  return os.str();
}

std::string kesten_csv(const KestenResult& r) {
  std::ostringstream os;
  os << "n,dim,trial,norm,bound,defect\n";
  for (const KestenTrial& t : r.trials)
    os << r.experiment.n << ',' << r.experiment.dim << ',' << t.trial << ',' << format_double(t.norm) << ','
       << format_double(r.bound) << ',' << format_double(t.defect) << '\n';
  return os.str();
}

json kesten_summary(const KestenResult& r) {
  return {{"n", r.experiment.n},
          {"dim", r.experiment.dim},
          {"trials", r.experiment.trials},
          {"seed", r.experiment.seed},
          {"slack", r.experiment.slack},
          {"bound", r.bound},
          {"max", r.max},
          {"mean", r.mean},
          {"exceedances", r.exceedances}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

json run_meta(const std::string& command, std::uint64_t seed) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"timestamp", buf}, {"command", command}, {"seed", seed}};
}

}  // namespace paving::io
