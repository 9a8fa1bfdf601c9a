#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "dimsim/convergence.hpp"
#include "dimsim/errors.hpp"
#include "dimsim/integrator.hpp"
#include "dimsim/io.hpp"
#include "dimsim/problems.hpp"
#include "dimsim/report.hpp"
#include "dimsim/ssp.hpp"
#include "dimsim/stability.hpp"
#include "dimsim/tableau.hpp"

namespace py = pybind11;
using namespace dimsim;
using nlohmann::json;

namespace {

py::object to_python(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = to_python(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

py::dict region_dict(const Region& r, const PolarGrid& grid) {
  py::dict d = to_python(region_sidecar(r, grid));
  ComplexVector b(static_cast<Eigen::Index>(r.boundary.size()));
  for (std::size_t k = 0; k < r.boundary.size(); ++k) b(static_cast<Eigen::Index>(k)) = r.boundary[k];
  d["theta"] = py::cast(r.theta);
  d["boundary"] = py::cast(b);
  return d;
}

PolarGrid make_grid(int n_angles, double r_max) {
  PolarGrid g;
  g.n_angles = n_angles;
  g.r_max = r_max;
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "IMEX DIMSIM coefficients, stability analysis and time integration";
  m.attr("__version__") = tool_version();

  static py::exception<Error> base(m, "Error");
  py::register_exception<UnknownNameError>(m, "UnknownNameError", base.ptr());
  py::register_exception<GridMismatchError>(m, "GridMismatchError", base.ptr());
  py::register_exception<StepFailure>(m, "StepFailure", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  py::class_<Tableau>(m, "Tableau")
      .def_readonly("name", &Tableau::name)
      .def_readonly("s", &Tableau::s)
      .def_readonly("r", &Tableau::r)
      .def_readonly("p", &Tableau::p)
      .def_readonly("q", &Tableau::q)
      .def_readonly("c", &Tableau::c)
      .def_readonly("A", &Tableau::A)
      .def_readonly("Astar", &Tableau::Astar)
      .def_readonly("U", &Tableau::U)
      .def_readonly("B", &Tableau::B)
      .def_readonly("Bstar", &Tableau::Bstar)
      .def_readonly("V", &Tableau::V)
      .def_readonly("lam", &Tableau::lambda)
      .def("to_dict", [](const Tableau& t) { return to_python(json(t)); })
      .def("__repr__", [](const Tableau& t) {
        return "<Tableau " + t.name + " s=" + std::to_string(t.s) + " p=" + std::to_string(t.p) + ">";
      });

  m.def("catalog_names", &catalog_names);
  m.def("catalog", [](const std::string& name) { return catalog(name); }, py::arg("name"));

  m.def("verify_order", [](const Tableau& t) { return to_python(as_json(verify_order(t))); });
  m.def("ssp_coefficient", [](const Tableau& t) { return to_python(as_json(ssp_coefficient(t))); });
  m.def("l_stability_check", [](const Tableau& t) { return to_python(as_json(l_stability_check(t))); });

  m.def("stability_matrix", &stability_matrix, py::arg("tableau"), py::arg("z0"), py::arg("z1"));
  m.def("spectral_radius", &spectral_radius);

  m.def(
      "region_SE",
      [](const Tableau& t, int n_angles, double r_max) {
        const PolarGrid g = make_grid(n_angles, r_max);
        return region_dict(region_SE(t, g), g);
      },
      py::arg("tableau"), py::arg("n_angles") = 720, py::arg("r_max") = 6.0);
  m.def(
      "region_S_alpha",
      [](const Tableau& t, double alpha, int n_angles, double r_max, int y_points) {
        const PolarGrid g = make_grid(n_angles, r_max);
        return region_dict(region_S_alpha(t, alpha, default_y_grid(y_points), g), g);
      },
      py::arg("tableau"), py::arg("alpha"), py::arg("n_angles") = 720, py::arg("r_max") = 6.0,
      py::arg("y_points") = 60);

  py::class_<SplitProblem>(m, "Problem")
      .def_readonly("name", &SplitProblem::name)
      .def_readonly("dim", &SplitProblem::dim)
      .def_readonly("t0", &SplitProblem::t0)
      .def_readonly("t_end", &SplitProblem::t_end)
      .def_readonly("y0", &SplitProblem::y0)
      .def("f", [](const SplitProblem& p, const Vector& y) { return p.f(y); })
      .def("g", [](const SplitProblem& p, const Vector& y) { return p.g(y); })
      .def("has_exact", [](const SplitProblem& p) { return static_cast<bool>(p.exact); })
      .def("exact", [](const SplitProblem& p, double t) {
        if (!p.exact) throw InvalidArgument("problem has no exact solution");
        return p.exact(t);
      });

  m.def("problem_names", &problem_names);
  m.def(
      "make_problem",
      [](const std::string& name, std::optional<int> N, std::optional<double> epsilon, std::optional<double> t_end,
         Complex lambda0, Complex lambda1) {
        ProblemParams pp;
        pp.N = N;
        pp.epsilon = epsilon;
        pp.t_end = t_end;
        pp.lambda0 = lambda0;
        pp.lambda1 = lambda1;
        return make_problem(name, pp);
      },
      py::arg("name"), py::arg("N") = py::none(), py::arg("epsilon") = py::none(), py::arg("t_end") = py::none(),
      py::arg("lambda0") = Complex(0.0, 0.0), py::arg("lambda1") = Complex(-1.0, 0.0));

  m.def(
      "integrate",
      [](const Tableau& t, const SplitProblem& p, double h, const std::string& start) {
        IntegrateOptions io;
        io.start.mode = parse_start_mode(start);
        io.record_trajectory = true;
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = integrate(t, p, h, io);
        }
        Matrix y(static_cast<Eigen::Index>(tr.y.size()), p.dim);
        for (std::size_t k = 0; k < tr.y.size(); ++k) y.row(static_cast<Eigen::Index>(k)) = tr.y[k].transpose();
        py::dict d;
        d["t"] = py::cast(tr.t);
        d["y"] = py::cast(y);
        d["y_final"] = py::cast(tr.y_final);
        d["n_steps"] = tr.n_steps;
        d["counters"] = to_python(as_json(tr.final_state.counters));
        return d;
      },
      py::arg("tableau"), py::arg("problem"), py::arg("h"), py::arg("start") = "reference-bootstrap");

  m.def(
      "convergence_study",
      [](const Tableau& t, const SplitProblem& p, const std::vector<double>& h_list, const std::string& reference,
         const std::string& start, int reference_factor, std::uint64_t seed) {
        ConvergenceOptions opt;
        opt.h_list = h_list;
        opt.reference = parse_reference_kind(reference);
        opt.start.mode = parse_start_mode(start);
        opt.reference_factor = reference_factor;
        opt.seed = seed;
        ConvergenceResult r;
        {
          py::gil_scoped_release release;
          r = convergence_study(t, p, opt);
        }
        return to_python(as_json(r));
      },
      py::arg("tableau"), py::arg("problem"), py::arg("h_list"), py::arg("reference") = "self",
      py::arg("start") = "reference-bootstrap", py::arg("reference_factor") = 20, py::arg("seed") = 0);

  m.def(
      "summarize",
      [](const Tableau& t, bool regions) {
        SummaryOptions so;
        so.regions = regions;
        MethodSummary s;
        {
          py::gil_scoped_release release;
          s = summarize_method(t, so);
        }
        return to_python(summary_json(s));
      },
      py::arg("tableau"), py::arg("regions") = true);
}
