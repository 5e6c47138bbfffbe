#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homog/errors.hpp"
#include "homog/harness.hpp"

namespace py = pybind11;
using namespace homog;

namespace {

CoefficientMatrix problem_arg(const std::string& spec) {
  // JSON text, a built-in name, or a path
  if (!spec.empty() && spec.front() == '{') return problem_from_json(json::parse(spec));
  return load_problem(spec);
}

py::array_t<double> samples_array(const PeriodicField& f, int R) {
  const auto v = f.samples(R);
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(f.dim()), R);
  py::array_t<double> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::string check(const std::string& spec) {
  const auto a = problem_arg(spec);
  const auto r = check_operator(a);
  return json{{"sup_max", r.sup_max},       {"sup_bound_ok", r.sup_bound_ok},
              {"symbol_min", r.symbol_min}, {"lambda2_estimate", r.lambda2_estimate},
              {"ok", r.ok},                 {"verdict", r.verdict}}
      .dump();
}

std::string homogenized(const std::string& spec, int cutoff, double tol) {
  const auto a = problem_arg(spec);
  const auto cells = solve_all_cells(a, cutoff, tol);
  auto j = homogenized_to_json(homogenize(a, cells));
  json res = json::object();
  for (const auto& [g, r] : cells.residuals) res[g.to_string()] = r;
  j["cell_residuals"] = res;
  j["cutoff"] = cells.cutoff;
  return j.dump();
}

std::string solve(const std::string& spec, int k, double lambda, const std::string& f, int cutoff, double tol) {
  const auto a = problem_arg(spec);
  const auto cells = solve_all_cells(a, cutoff);
  const auto hat = homogenize(a, cells);
  auto p = make_problem(a, k, make_rhs(json::parse(f), a.dim()), cells.cutoff, lambda, tol);
  const auto b = build_bundle(p, cells, hat);
  const auto r = error_report(b, a.order());
  return json{{"k", k},
              {"eps", r.eps},
              {"lambda", p.lambda},
              {"cutoff", p.cutoff},
              {"iterations", b.iterations},
              {"residual", b.residual},
              {"l2_u", r.l2_u},
              {"hm_vhat", r.hm_vhat},
              {"hm_steklov", r.hm_steklov},
              {"hm_v", r.hm_v},
              {"f_norm", r.f_norm},
              {"u_eps", field_to_json(b.u_eps)},
              {"u", field_to_json(b.u)}}
      .dump();
}

std::string sweep(const std::string& config, const std::string& base_dir) {
  auto cfg = sweep_config_from_json(json::parse(config), base_dir);
  const auto rep = run_sweep(cfg);
  if (!cfg.output_dir.empty()) write_report(rep, cfg.output_dir, cfg.plot);
  return rep.to_json().dump();
}

py::tuple slope(const std::vector<double>& eps, const std::vector<double>& err, double floor) {
  if (eps.size() != err.size()) throw ShapeError("eps and error lists differ in length");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < eps.size(); ++i) pts.emplace_back(eps[i], err[i]);
  const auto f = fit_slope(pts, floor);
  return py::make_tuple(f.slope, f.intercept, f.rms_residual, f.ci95);
}

std::string potential(const std::string& input) {
  const auto g = solenoidal_from_json(json::parse(input));
  const auto G = skew_potential(g);
  return json{{"skew_defect", G.skew_defect()},
              {"divergence_residual", G.divergence_residual(g)},
              {"measured_constant", G.measured_constant},
              {"potential", potential_to_json(G)}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_homog, m) {
  m.doc() = "Spectral periodic homogenization on the torus";
  m.attr("__version__") = kVersion;

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_ValueError);
  py::register_exception<DegenerateFitError>(m, "DegenerateFitError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("builtin_problems", &builtin_problems);
  m.def("problem_json", [](const std::string& spec) { return problem_to_json(problem_arg(spec)).dump(); }, py::arg("spec"));
  m.def("check", &check, py::arg("problem"));
  m.def("homogenized", &homogenized, py::arg("problem"), py::arg("cutoff") = -1, py::arg("tol") = 1e-10,
        py::call_guard<py::gil_scoped_release>());
  m.def("solve", &solve, py::arg("problem"), py::arg("k"), py::arg("lam") = -1.0, py::arg("f") = R"({"seed": 1})",
        py::arg("cutoff") = -1, py::arg("tol") = 1e-10, py::call_guard<py::gil_scoped_release>());
  m.def("sweep", &sweep, py::arg("config"), py::arg("base_dir") = "", py::call_guard<py::gil_scoped_release>());
  m.def("fit_slope", &slope, py::arg("eps"), py::arg("errors"), py::arg("floor") = 0.0);
  m.def("random_solenoidal", [](int d, int mm, int modes, std::uint64_t seed) { return solenoidal_to_json(random_solenoidal(d, mm, modes, seed)).dump(); },
        py::arg("d"), py::arg("m"), py::arg("modes"), py::arg("seed"));
  m.def("skew_potential", &potential, py::arg("solenoidal"));
  m.def("field_samples", [](const std::string& field, int R) { return samples_array(field_from_json(json::parse(field)), R); },
        py::arg("field"), py::arg("R"));
}
