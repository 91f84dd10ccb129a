#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "perpetuity/bounds.hpp"
#include "perpetuity/config.hpp"
#include "perpetuity/error.hpp"
#include "perpetuity/oracle.hpp"
#include "perpetuity/pipeline.hpp"
#include "perpetuity/simulate.hpp"

namespace py = pybind11;
using namespace perpetuity;

namespace {

std::vector<Atom> to_atoms(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Atom> out;
  for (auto [v, p] : pairs) out.push_back({v, p});
  return out;
}

}  // namespace

PYBIND11_MODULE(_perpetuity, m) {
  m.doc() = "Monte Carlo tails and tail bounds for perpetuities R = MR + Q";

  static py::handle error_type = py::exception<Error>(m, "PerpetuityError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, (std::string("line ") + std::to_string(e.line()) + ": " + e.what()).c_str());
    }
  });

  py::class_<DiscreteFinite>(m, "DiscreteFinite")
      .def(py::init([](const std::vector<std::pair<double, double>>& atoms) { return DiscreteFinite{to_atoms(atoms)}; }),
           py::arg("atoms"))
      .def_property_readonly("atoms", [](const DiscreteFinite& d) {
        std::vector<std::pair<double, double>> out;
        for (const Atom& a : d.atoms) out.emplace_back(a.value, a.prob);
        return out;
      });

  py::class_<UniformInterval>(m, "UniformInterval")
      .def(py::init([](double a, double b) { return UniformInterval{a, b}; }), py::arg("a"), py::arg("b"))
      .def_readonly("a", &UniformInterval::a)
      .def_readonly("b", &UniformInterval::b);

  py::class_<PiecewiseLinearCdf>(m, "PiecewiseLinearCdf")
      .def(py::init([](const std::vector<std::pair<double, double>>& knots) {
             PiecewiseLinearCdf c;
             for (auto [v, f] : knots) c.knots.push_back({v, f});
             return c;
           }),
           py::arg("knots"));

  py::class_<PerpetuityModel>(m, "PerpetuityModel")
      .def_readonly("q_bound", &PerpetuityModel::q_bound)
      .def_readonly("mean_abs_m", &PerpetuityModel::mean_abs_m)
      .def_readonly("atom_at_one", &PerpetuityModel::atom_at_one)
      .def_property_readonly("m_nonneg", [](const PerpetuityModel& p) { return p.flags.m_nonneg; })
      .def_property_readonly("q_constant", [](const PerpetuityModel& p) { return p.flags.q_constant; })
      .def_property_readonly("contractive", [](const PerpetuityModel& p) { return p.flags.contractive; });

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](std::uint64_t n_samples, std::uint64_t seed, double truncation_eps, std::uint64_t max_terms,
                       std::optional<unsigned> workers) {
             return SimConfig{n_samples, seed, truncation_eps, max_terms, workers};
           }),
           py::arg("n_samples") = 1, py::arg("seed") = 0, py::arg("truncation_eps") = 1e-12,
           py::arg("max_terms") = 1'000'000, py::arg("workers") = py::none())
      .def_readwrite("n_samples", &SimConfig::n_samples)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("truncation_eps", &SimConfig::truncation_eps)
      .def_readwrite("max_terms", &SimConfig::max_terms)
      .def_readwrite("workers", &SimConfig::worker_hint);

  py::class_<TailCurve>(m, "TailCurve")
      .def_readonly("xs", &TailCurve::xs)
      .def_readonly("n", &TailCurve::n)
      .def_readonly("exceed_counts", &TailCurve::exceed_counts)
      .def_readonly("estimates", &TailCurve::estimates)
      .def_readonly("ci_low", &TailCurve::ci_low)
      .def_readonly("ci_high", &TailCurve::ci_high);

  py::class_<PathDecomposition>(m, "PathDecomposition")
      .def_readonly("t_values", &PathDecomposition::t_values)
      .def_readonly("delta", &PathDecomposition::delta)
      .def_readonly("lhs", &PathDecomposition::lhs)
      .def_readonly("rhs", &PathDecomposition::rhs);

  py::class_<BoundResult>(m, "BoundResult")
      .def_readonly("value", &BoundResult::value)
      .def_readonly("log_value", &BoundResult::log_value)
      .def_readonly("valid", &BoundResult::valid)
      .def_readonly("vacuous", &BoundResult::vacuous)
      .def_readonly("conditions", &BoundResult::conditions)
      .def("__repr__", [](const BoundResult& r) {
        return "BoundResult(log_value=" + format_double(r.log_value) + ", valid=" + (r.valid ? "True" : "False") + ")";
      });

  py::class_<ChernoffParams>(m, "ChernoffParams")
      .def_readonly("delta", &ChernoffParams::delta)
      .def_readonly("lambda_", &ChernoffParams::lambda)
      .def_readonly("p", &ChernoffParams::p)
      .def_readonly("feasible", &ChernoffParams::feasible)
      .def_readonly("paper_sufficient", &ChernoffParams::paper_sufficient);

  m.def("validate_model", &validate_model, py::arg("m"), py::arg("q"));
  m.def("p_delta", &p_delta, py::arg("model"), py::arg("delta"));
  m.def("sample_perpetuity", &sample_perpetuity, py::arg("model"), py::arg("cfg"), py::arg("index"));
  m.def("sample_dominating_series", &sample_dominating_series, py::arg("model"), py::arg("delta"), py::arg("cfg"),
        py::arg("index"));
  m.def("decompose_path", [](const std::vector<double>& path, double delta) { return decompose_path(path, delta); },
        py::arg("abs_m_path"), py::arg("delta"));
  m.def(
      "simulate_tail",
      [](const PerpetuityModel& model, const SimConfig& cfg, std::vector<double> xs, bool use_abs) {
        py::gil_scoped_release release;
        return simulate_tail(model, cfg, std::move(xs), use_abs).curve;
      },
      py::arg("model"), py::arg("cfg"), py::arg("xs"), py::arg("use_abs") = true);

  m.def("geometric_mgf", &geometric_mgf, py::arg("p"), py::arg("lambda_"));
  m.def("lower_bound_gg", &lower_bound_gg, py::arg("model"), py::arg("x"), py::arg("c") = 0.5);
  m.def("lower_bound_simplified", &lower_bound_simplified, py::arg("model"), py::arg("x"));
  m.def("upper_bound_paper", &upper_bound_paper, py::arg("model"), py::arg("x"));
  m.def("make_chernoff_params", &make_chernoff_params, py::arg("model"), py::arg("delta"), py::arg("lambda_"));
  m.def("chernoff_bound", &chernoff_bound, py::arg("model"), py::arg("t"), py::arg("params"));
  m.def("paper_candidate_params", &paper_candidate_params, py::arg("model"), py::arg("t"));
  m.def(
      "optimize_chernoff",
      [](const PerpetuityModel& model, double t) {
        const ChernoffOptimum opt = optimize_chernoff(model, t);
        return py::make_tuple(opt.params, opt.bound);
      },
      py::arg("model"), py::arg("t"));

  m.def(
      "exact_distribution",
      [](const PerpetuityModel& model, std::uint64_t n) {
        std::vector<std::pair<double, double>> out;
        for (const PmfAtom& a : exact_distribution(model, n).atoms) out.emplace_back(a.value, a.prob);
        return out;
      },
      py::arg("model"), py::arg("n"));
  m.def("dickman_tail", &dickman_tail, py::arg("x"));

  m.def(
      "run_pipeline",
      [](const std::string& config_json) {
        const RunConfig cfg = parse_run_config(config_json);
        const PerpetuityModel model = validate_model(cfg.m, cfg.q);
        PipelineOutput out;
        {
          py::gil_scoped_release release;
          out = run_pipeline(cfg, model);
        }
        return py::make_tuple(out.csv, out.metadata.dump());
      },
      py::arg("config_json"),
      "Run a JSON config; returns (csv_text, metadata_json_text).");
}
