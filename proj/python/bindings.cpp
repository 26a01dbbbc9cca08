#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "paving/basis.hpp"
#include "paving/bounds.hpp"
#include "paving/dixmier.hpp"
#include "paving/freeprob.hpp"
#include "paving/index.hpp"
#include "paving/io.hpp"
#include "paving/l2.hpp"
#include "paving/pipeline.hpp"
#include "paving/search.hpp"

namespace py = pybind11;
using namespace paving;

namespace {

std::vector<double> ratios_of(const PavingCertificate& c) { return c.ratios; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Paving partitions, conditional expectations and index estimates for multi-matrix inclusions";

  py::register_exception<Error>(m, "PavingError");

  py::class_<AlgebraShape>(m, "AlgebraShape")
      .def(py::init<std::vector<int>, std::vector<double>>(), py::arg("block_dims"), py::arg("trace_weights"))
      .def_static("full_matrix", &AlgebraShape::full_matrix)
      .def_property_readonly("block_dims", &AlgebraShape::block_dims)
      .def_property_readonly("trace_weights", &AlgebraShape::trace_weights)
      .def_property_readonly("total_dim", &AlgebraShape::total_dim);

  py::class_<Element>(m, "Element")
      .def(py::init<AlgebraShape, std::vector<Matrix>>(), py::arg("shape"), py::arg("blocks"))
      .def_property_readonly("shape", &Element::shape)
      .def_property_readonly("blocks", &Element::blocks)
      .def("adjoint", &Element::adjoint)
      .def("__add__", [](const Element& a, const Element& b) { return a + b; })
      .def("__sub__", [](const Element& a, const Element& b) { return a - b; })
      .def("__matmul__", [](const Element& a, const Element& b) { return a * b; });

  m.def("trace", &trace);
  m.def("op_norm", &op_norm);
  m.def("l2_norm", &l2_norm);
  m.def("random_element", [](const AlgebraShape& s, const std::string& kind, std::uint64_t seed, double theta) {
    RandomKind k = RandomKind::selfadjoint_trace_zero_contraction;
    if (kind == "positive") k = RandomKind::positive_contraction;
    else if (kind == "projection") k = RandomKind::projection;
    else if (kind != "selfadjoint") throw py::value_error("kind must be selfadjoint, positive or projection");
    return random_element(s, k, seed, theta);
  }, py::arg("shape"), py::arg("kind"), py::arg("seed"), py::arg("theta") = 0.5);

  py::class_<InclusionSpec>(m, "InclusionSpec")
      .def_static("tensor", &InclusionSpec::tensor)
      .def_static("scalars_in", &InclusionSpec::scalars_in)
      .def_static("factor", &InclusionSpec::factor)
      .def_static("from_family", &InclusionSpec::from_family)
      .def_static("from_json", [](const std::string& text) {
        return io::inclusion_spec_from_json(io::json::parse(text));
      })
      .def("to_json", [](const InclusionSpec& s) { return io::inclusion_spec_to_json(s).dump(); })
      .def_readonly("n_shape", &InclusionSpec::n_shape)
      .def_readonly("m_shape", &InclusionSpec::m_shape)
      .def_readonly("lambda_", &InclusionSpec::lambda);

  py::class_<Inclusion>(m, "Inclusion")
      .def_static("build", &Inclusion::build, py::arg("spec"), py::arg("seed") = 0, py::arg("rotate") = false)
      .def_property_readonly("n_shape", &Inclusion::n_shape)
      .def_property_readonly("m_shape", &Inclusion::m_shape)
      .def("embed", &Inclusion::embed)
      .def("cond_exp_n", &Inclusion::cond_exp_n)
      .def("cond_exp_comm", &Inclusion::cond_exp_comm)
      .def("commutant_dim", &Inclusion::commutant_dim)
      .def("exact_index", &Inclusion::exact_index);

  py::class_<IndexEstimate>(m, "IndexEstimate")
      .def_readonly("lambda_", &IndexEstimate::lambda)
      .def_readonly("index", &IndexEstimate::index)
      .def_readonly("trials", &IndexEstimate::trials)
      .def_readonly("min_seed", &IndexEstimate::min_seed)
      .def_readonly("exact", &IndexEstimate::exact);
  m.def("pp_index_estimate", &pp_index_estimate, py::arg("inclusion"), py::arg("trials"), py::arg("seed"));
  m.def("pp_inequality_check", &pp_inequality_check);

  py::class_<DobReport>(m, "DobReport")
      .def_readonly("value", &DobReport::value)
      .def_readonly("lower", &DobReport::lower)
      .def_readonly("upper", &DobReport::upper)
      .def_readonly("basis_size", &DobReport::basis_size);
  m.def("d_ob", py::overload_cast<const Inclusion&>(&d_ob));

  py::class_<TheoremBound>(m, "TheoremBound")
      .def_readonly("n", &TheoremBound::n)
      .def_readonly("m", &TheoremBound::m)
      .def_readonly("r", &TheoremBound::r);
  m.def("theorem_bound", &theorem_bound);
  m.def("lemma24_lower_bound", &lemma24_lower_bound);
  m.def("dixmier_count_bound", &dixmier_count_bound);
  m.def("kesten_bound", &kesten_bound);

  py::class_<PavingProblem>(m, "PavingProblem")
      .def_readonly("epsilon", &PavingProblem::epsilon)
      .def_readonly("index", &PavingProblem::index);
  m.def("make_problem", [](const Inclusion& inc, const std::string& kind, int count, std::uint64_t seed, double eps) {
    FamilySource src{kind, count, seed, 0.5};
    return make_problem(inc, generate_family(inc, src), eps, std::nullopt, seed);
  }, py::arg("inclusion"), py::arg("kind"), py::arg("count"), py::arg("seed"), py::arg("epsilon"));

  py::class_<PavingCertificate>(m, "PavingCertificate")
      .def_property_readonly("mode", [](const PavingCertificate& c) { return std::string(mode_name(c.mode)); })
      .def_property_readonly("ratios", &ratios_of)
      .def_readonly("max_ratio", &PavingCertificate::max_ratio)
      .def_readonly("r", &PavingCertificate::r)
      .def_readonly("verified", &PavingCertificate::verified)
      .def_readonly("soundness_alarm", &PavingCertificate::soundness_alarm);

  m.def("pave_search", [](const PavingProblem& p, int r, long steps, std::uint64_t seed) {
    SearchConfig cfg;
    cfg.r = r;
    cfg.steps = steps;
    cfg.seed = seed;
    return pave_search(p, cfg).certificate;
  }, py::arg("problem"), py::arg("r"), py::arg("steps") = 20000, py::arg("seed") = 0);
  m.def("dixmier_average", [](const PavingProblem& p, std::uint64_t seed) {
    DixmierConfig cfg;
    cfg.seed = seed;
    return dixmier_average_run(p, cfg).certificate;
  }, py::arg("problem"), py::arg("seed") = 0);
  m.def("l2_pave", &l2_pave, py::arg("problem"), py::arg("n"), py::arg("seed"), py::arg("delta_l2") = 0.05);
  m.def("trivial_certificate", &trivial_certificate);

  py::class_<KestenResult>(m, "KestenResult")
      .def_readonly("bound", &KestenResult::bound)
      .def_readonly("max", &KestenResult::max)
      .def_readonly("mean", &KestenResult::mean)
      .def_readonly("exceedances", &KestenResult::exceedances)
      .def_property_readonly("norms", [](const KestenResult& r) {
        std::vector<double> v;
        for (const auto& t : r.trials) v.push_back(t.norm);
        return v;
      });
  m.def("run_kesten", [](int n, int dim, int trials, std::uint64_t seed) {
    KestenExperiment exp;
    exp.n = n;
    exp.dim = dim;
    exp.trials = trials;
    exp.seed = seed;
    return run_kesten(exp);
  }, py::arg("n"), py::arg("dim"), py::arg("trials"), py::arg("seed"));
}
