#include "tumorbif/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "tumorbif/errors.hpp"
#include "tumorbif/field_solver.hpp"
#include "tumorbif/geometry.hpp"
#include "tumorbif/mode_ode.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"

namespace tumorbif {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

class Suite {
 public:
  void add(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r;
    r.name = std::move(name);
    try {
      auto [ok, detail] = body();
      r.passed = ok;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    results_.push_back(std::move(r));
  }
  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::vector<CheckResult> results_;
};

ShapeCoeffs random_shape(int l, int K, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ShapeCoeffs rho = ShapeCoeffs::zero(l, K);
  for (int m = 0; m <= K; ++m) rho.a[m] = u(rng) / (1.0 + m * m);
  const double s = sup_norm(rho);
  for (double& a : rho.a) a *= amplitude / s;
  return rho;
}

}  // namespace

std::vector<CheckResult> run_property_suite(const io::RunConfig& cfg) {
  cfg.validate();
  Suite suite;
  const NutrientFn f = cfg.model.nutrient();
  const double A = cfg.model.resolved_A();
  const RadialOptions ropt = cfg.radial_options();
  const FieldOptions fopt = cfg.field_options();
  const int l = cfg.task.l;

  suite.add("model: f' matches central differences on [0, 2]", [&] {
    double worst = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double x = 2.0 * i / 1000.0;
      const double h = 1e-6;
      const double fd = (eval_f(f, x + h) - eval_f(f, x - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - eval_f_prime(f, x)) / std::max(1.0, std::abs(fd)));
    }
    return std::pair{worst <= 1e-7, "max rel diff " + fmt(worst)};
  });

  RadialEquilibrium eq;
  suite.add("radial: equilibrium residual <= 1e-10", [&] {
    eq = find_RA(A, f, ropt);
    return std::pair{eq.residual <= 1e-10, "R_A = " + std::to_string(eq.R_A) + ", residual " + fmt(eq.residual)};
  });
  if (eq.R_A <= 0.0) return suite.take();

  suite.add("radial: R_A strictly decreasing in A", [&] {
    const double f1 = f.value(1.0);
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
      const double a = f1 * (0.15 + 0.7 * i / 4.0);
      const double R = find_RA(a, f, ropt).R_A;
      ok = ok && R < prev;
      prev = R;
    }
    return std::pair{ok, std::string("5 values of A in (0.15, 0.85) f(1)")};
  });

  std::vector<ModeSolution> modes;
  SymbolTable table;
  suite.add("mode_ode: integrator and Volterra routes agree for n <= 8", [&] {
    double worst = 0.0;
    for (int n = 0; n <= 8; ++n) {
      const ModeSolution a = solve_mode(n, eq, f);
      const ModeSolution b = solve_mode_volterra(n, eq, f);
      worst = std::max({worst, std::abs(a.u1 - b.u1) / std::abs(b.u1),
                        std::abs(a.du1 - b.du1) / std::max(1e-300, std::abs(b.du1))});
    }
    return std::pair{worst <= 1e-8, "max rel diff " + fmt(worst)};
  });

  suite.add("mode_ode: u_{k+1} <= u_k pointwise", [&] {
    modes = solve_modes(cfg.numerics.k_max, eq, f);
    table = SymbolTable::from_modes(eq, f, modes);
    const EstimateReport rep = verify_estimates(modes, estimate_constant(eq, f, modes[0].u1));
    return std::pair{rep.pointwise_monotone, "k <= " + std::to_string(cfg.numerics.k_max)};
  });
  if (table.denom.empty()) return suite.take();

  suite.add("spectrum: mu_1 vanishes identically", [&] {
    const double d1 = std::abs(table.denom[1]);
    return std::pair{d1 <= 1e-7, "|d_1| = " + fmt(d1)};
  });

  suite.add("spectrum: k1 stable and G_k increasing beyond it", [&] {
    const int k1 = find_k1(table);
    const SymbolTable wide = SymbolTable::assemble(eq, f, 2 * cfg.numerics.k_max);
    const int k1w = find_k1(wide);
    bool inc = true;
    for (int k = k1; k + 1 < table.k_max(); ++k)
      inc = inc && bif_value(k, table) > 0.0 && bif_value(k, table) < bif_value(k + 1, table);
    return std::pair{k1 == k1w && inc, "k1 = " + std::to_string(k1) + " (doubled k_max: " +
                                           std::to_string(k1w) + ")"};
  });

  suite.add("spectrum: mode 0 nondegenerate", [&] {
    return std::pair{check_feri(table), "d_0 = " + fmt(table.denom[0])};
  });

  suite.add("spectrum: mu affine in G and even in k", [&] {
    double worst = 0.0;
    for (int k = 0; k <= std::min(16, table.k_max()); ++k) {
      const double m0 = mu(k, 0.0, table), m1 = mu(k, 1.0, table), m7 = mu(k, 7.0, table);
      worst = std::max({worst, std::abs(m7 - (m0 + 7.0 * (m1 - m0))) / (1.0 + std::abs(m7)),
                        std::abs(mu(-k, 3.0, table) - mu(k, 3.0, table))});
    }
    return std::pair{worst <= 1e-12, "max defect " + fmt(worst)};
  });

  suite.add("spectrum: transversality at catalog points", [&] {
    const auto pts = catalog(l, 3, table);
    bool ok = !pts.empty();
    for (const auto& p : pts) ok = ok && transversality(p, table) > 0.0;
    return std::pair{ok, std::to_string(pts.size()) + " points for l = " + std::to_string(l)};
  });

  suite.add("geometry: normal field orthogonal to the tangent", [&] {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const ShapeCoeffs rho = random_shape(l, 4, 0.1, rng);
      for (int j = 0; j < 64; ++j) {
        const double s = 2.0 * std::numbers::pi * j / 64;
        const ShapeValue v = eval_shape(rho, s);
        // tangent in the polar frame: (r', r) with r = 1 + rho
        const auto n = normal_field(rho, s);
        worst = std::max(worst, std::abs(n[0] * v.d1 + n[1] * (1.0 + v.rho)));
      }
    }
    return std::pair{worst <= 1e-14, "max |<n, t>| " + fmt(worst)};
  });

  suite.add("geometry: circle curvature is 1/R", [&] {
    const double k = curvature(ShapeCoeffs::zero(l, 3), eq.R_A, 0.3);
    return std::pair{std::abs(k - 1.0 / eq.R_A) <= 1e-14, "kappa R_A - 1 = " + fmt(k * eq.R_A - 1.0)};
  });

  const double G = cfg.model.G.value_or(10.0);
  suite.add("field_solver: trivial branch Phi(G, 0) vanishes", [&] {
    double worst = 0.0;
    for (double g : {0.0, G}) worst = std::max(worst, assemble_phi(g, ShapeCoeffs::zero(l, 2), eq, f, fopt).sup_norm());
    return std::pair{worst <= 1e-7, "sup |Phi| " + fmt(worst)};
  });

  suite.add("field_solver: multiplier of cos 2s matches the symbol", [&] {
    const MultiplierCheck mc = multiplier_check(G, 2, cfg.task.fd_eps, table, eq, f, fopt, cfg.task.multiplier_bound);
    return std::pair{mc.passed, "rel err " + fmt(mc.relative_error)};
  });

  suite.add("field_solver: even l-periodic shapes stay in their subspace", [&] {
    std::mt19937_64 rng(5);
    const ShapeCoeffs rho = random_shape(l, std::max(1, (fopt.grid.n_theta / 4 - 1) / l / 2), 0.05, rng);
    FieldOptions sym = fopt;
    sym.grid = symmetric_grid(fopt.grid, l);
    const double leak = assemble_phi(G, rho, eq, f, sym).leakage(l);
    return std::pair{leak <= 1e-7, "leakage " + fmt(leak)};
  });

  suite.add("continuation: corrector converges near the first bifurcation point", [&] {
    const auto pts = catalog(l, 1, table);
    if (pts.empty()) return std::pair{false, std::string("empty catalog")};
    const ContinuationOptions copt = cfg.continuation_options();
    const int K = shape_order(pts[0].l, copt);
    const ShapeCoeffs pred = ShapeCoeffs::mode(pts[0].l, pts[0].k, 1e-3, K);
    const BranchPoint p = newton_correct(pts[0].G, pred, pts[0].k, 1e-3, eq, f, copt);
    return std::pair{p.residual <= copt.tol && p.iterations <= 5,
                     "mode " + std::to_string(pts[0].mode) + ": " + std::to_string(p.iterations) +
                         " iterations, residual " + fmt(p.residual)};
  });

  suite.add("continuation: trivial solution locally unique between catalog values", [&] {
    const auto pts = catalog(l, 2, table);
    if (pts.size() < 2) return std::pair{false, std::string("fewer than two catalog points")};
    const double Gm = 0.5 * (pts[0].G + pts[1].G);
    const ProbeResult r = non_bifurcation_probe(Gm, l, table, eq, f, cfg.task.attempts, cfg.task.seed,
                                                cfg.continuation_options());
    return std::pair{r.ok(), std::to_string(r.returned_to_zero) + "/" + std::to_string(r.attempts) +
                                 " returned to rho = 0 at G = " + std::to_string(Gm)};
  });

  return suite.take();
}

}  // namespace tumorbif
