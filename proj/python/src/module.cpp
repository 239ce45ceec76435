#include <pybind11/pybind11.h>
#include <pybind11/iostream.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

#include "tumorbif/cli.hpp"
#include "tumorbif/continuation.hpp"
#include "tumorbif/errors.hpp"
#include "tumorbif/field_solver.hpp"
#include "tumorbif/io.hpp"
#include "tumorbif/mode_ode.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"
#include "tumorbif/version.hpp"

namespace py = pybind11;
using namespace tumorbif;

namespace {

NutrientFn make_f(const std::string& kind, double sigma) {
  io::ModelConfig m;
  m.f_kind = kind;
  m.sigma = sigma;
  return m.nutrient();
}

FieldOptions field_opts(int n_r, int n_theta) {
  FieldOptions o;
  o.grid = {n_r, n_theta};
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radial tumor equilibria, linearization spectrum and bifurcating branches.";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  auto solver = py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<FoldError>(m, "FoldError", solver.ptr());
  py::register_exception<StepSizeError>(m, "StepSizeError", solver.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<NutrientFn>(m, "NutrientFn")
      .def_static("identity", &NutrientFn::identity)
      .def_static("michaelis_menten", &NutrientFn::michaelis_menten, py::arg("sigma"))
      .def_property_readonly("name", &NutrientFn::name)
      .def("__call__", [](const NutrientFn& f, double psi) { return eval_f(f, psi); })
      .def("derivative", [](const NutrientFn& f, double psi) { return eval_f_prime(f, psi); });

  m.def("nutrient", &make_f, py::arg("kind") = "identity", py::arg("sigma") = 1.0);
  m.def("unit_radius_A", &io::unit_radius_A, "A with R_A = 1 for f = identity");

  py::class_<RadialEquilibrium>(m, "RadialEquilibrium")
      .def_readonly("A", &RadialEquilibrium::A)
      .def_readonly("R_A", &RadialEquilibrium::R_A)
      .def_readonly("c_A", &RadialEquilibrium::c_A)
      .def_readonly("residual", &RadialEquilibrium::residual)
      .def("v0", [](const RadialEquilibrium& eq, double s) { return eval_v0(eq, s); }, py::arg("s"))
      .def("__repr__", [](const RadialEquilibrium& eq) {
        std::ostringstream os;
        os << "RadialEquilibrium(A=" << eq.A << ", R_A=" << eq.R_A << ")";
        return os.str();
      });

  m.def("find_RA", [](double A, const NutrientFn& f) { return find_RA(A, f); }, py::arg("A"),
        py::arg("f") = NutrientFn::identity());

  py::class_<ModeSolution>(m, "ModeSolution")
      .def_readonly("n", &ModeSolution::n)
      .def_readonly("u1", &ModeSolution::u1)
      .def_readonly("du1", &ModeSolution::du1)
      .def("ratio", &ModeSolution::ratio);
  m.def("solve_mode", [](int n, const RadialEquilibrium& eq, const NutrientFn& f) { return solve_mode(n, eq, f); },
        py::arg("n"), py::arg("eq"), py::arg("f") = NutrientFn::identity());
  m.def("solve_mode_volterra",
        [](int n, const RadialEquilibrium& eq, const NutrientFn& f) { return solve_mode_volterra(n, eq, f); },
        py::arg("n"), py::arg("eq"), py::arg("f") = NutrientFn::identity());

  py::class_<SymbolTable>(m, "SymbolTable")
      .def_static("assemble",
                  [](const RadialEquilibrium& eq, const NutrientFn& f, int k_max) {
                    return SymbolTable::assemble(eq, f, k_max);
                  },
                  py::arg("eq"), py::arg("f") = NutrientFn::identity(), py::arg("k_max") = 64)
      .def_readonly("R_A", &SymbolTable::R_A)
      .def_readonly("A", &SymbolTable::A)
      .def_readonly("denom", &SymbolTable::denom)
      .def_readonly("ratio", &SymbolTable::ratio)
      .def_property_readonly("k_max", &SymbolTable::k_max);

  py::class_<BifurcationPoint>(m, "BifurcationPoint")
      .def_readonly("mode", &BifurcationPoint::mode)
      .def_readonly("l", &BifurcationPoint::l)
      .def_readonly("k", &BifurcationPoint::k)
      .def_readonly("G", &BifurcationPoint::G)
      .def_readonly("within_theorem", &BifurcationPoint::within_theorem);

  m.def("mu", &mu, py::arg("k"), py::arg("G"), py::arg("table"));
  m.def("bif_value", &bif_value, py::arg("k"), py::arg("table"));
  m.def("find_k1", &find_k1, py::arg("table"));
  m.def("g_bullet", &g_bullet, py::arg("table"), py::arg("k1"));
  m.def("catalog", &catalog, py::arg("l"), py::arg("count"), py::arg("table"));
  m.def("make_point", &make_point, py::arg("l"), py::arg("k"), py::arg("table"));

  py::class_<ShapeCoeffs>(m, "ShapeCoeffs")
      .def(py::init([](int l, std::vector<double> a) { return ShapeCoeffs{l, std::move(a)}; }),
           py::arg("l"), py::arg("a"))
      .def_readwrite("l", &ShapeCoeffs::l)
      .def_readwrite("a", &ShapeCoeffs::a);

  py::class_<PhiTrace>(m, "PhiTrace")
      .def_readonly("theta", &PhiTrace::theta)
      .def_readonly("values", &PhiTrace::values)
      .def_readonly("cos_coeffs", &PhiTrace::cos_coeffs)
      .def_readonly("sin_coeffs", &PhiTrace::sin_coeffs)
      .def("sup_norm", &PhiTrace::sup_norm)
      .def("leakage", &PhiTrace::leakage, py::arg("l"));

  m.def("assemble_phi",
        [](double G, const ShapeCoeffs& rho, const RadialEquilibrium& eq, const NutrientFn& f, int n_r,
           int n_theta) { return assemble_phi(G, rho, eq, f, field_opts(n_r, n_theta)); },
        py::arg("G"), py::arg("rho"), py::arg("eq"), py::arg("f") = NutrientFn::identity(),
        py::arg("n_r") = 48, py::arg("n_theta") = 128);

  py::class_<MultiplierCheck>(m, "MultiplierCheck")
      .def_readonly("measured", &MultiplierCheck::measured)
      .def_readonly("reference", &MultiplierCheck::reference)
      .def_readonly("relative_error", &MultiplierCheck::relative_error)
      .def_readonly("leakage", &MultiplierCheck::leakage)
      .def_readonly("passed", &MultiplierCheck::passed);
  m.def("multiplier_check",
        [](double G, int k, double eps, const SymbolTable& t, const RadialEquilibrium& eq,
           const NutrientFn& f) { return multiplier_check(G, k, eps, t, eq, f); },
        py::arg("G"), py::arg("k"), py::arg("eps"), py::arg("table"), py::arg("eq"),
        py::arg("f") = NutrientFn::identity());

  py::class_<BranchPoint>(m, "BranchPoint")
      .def_readonly("eps", &BranchPoint::eps)
      .def_readonly("G", &BranchPoint::G)
      .def_readonly("rho", &BranchPoint::rho)
      .def_readonly("residual", &BranchPoint::residual)
      .def_readonly("iterations", &BranchPoint::iterations);
  py::class_<Branch>(m, "Branch")
      .def_readonly("l", &Branch::l)
      .def_readonly("k", &Branch::k)
      .def_readonly("G_kl", &Branch::G_kl)
      .def_readonly("points", &Branch::points)
      .def_readonly("warnings", &Branch::warnings);
  py::class_<AsymptoticFit>(m, "AsymptoticFit")
      .def_readonly("intercept", &AsymptoticFit::intercept)
      .def_readonly("slope_bound", &AsymptoticFit::slope_bound)
      .def_readonly("quadratic_defect", &AsymptoticFit::quadratic_defect);

  m.def("trace_branch",
        [](const BifurcationPoint& p, double eps_max, int n_steps, const RadialEquilibrium& eq,
           const NutrientFn& f) {
          py::gil_scoped_release release;
          return trace_branch(p, eps_max, n_steps, eq, f);
        },
        py::arg("point"), py::arg("eps_max"), py::arg("n_steps"), py::arg("eq"),
        py::arg("f") = NutrientFn::identity());
  m.def("fit_asymptotics", &fit_asymptotics, py::arg("branch"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          py::scoped_ostream_redirect out_guard;
          return cli::run(args, std::cout, std::cerr);
        },
        py::arg("args"), "Runs the command-line tool in-process; returns its exit code.");
}
