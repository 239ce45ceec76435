// Acceptance runner: one PASS/FAIL line per criterion.
//
//   tumorbif_acceptance                 all criteria
//   tumorbif_acceptance --criterion 6   a single one
//
// Exit status 0 iff every selected criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracle/bessel_series.hpp"
#include "tumorbif/continuation.hpp"
#include "tumorbif/field_solver.hpp"
#include "tumorbif/mode_ode.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"

using namespace tumorbif;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const NutrientFn kId = NutrientFn::identity();

struct UnitSetup {
  RadialEquilibrium eq;
  SymbolTable table;
};

const UnitSetup& unit() {
  static const UnitSetup s = [] {
    UnitSetup u;
    u.eq = find_RA(oracle::A_for_radius(1.0), kId);
    u.table = SymbolTable::assemble(u.eq, kId, 64);
    return u;
  }();
  return s;
}

Outcome bessel_oracle() {
  const RadialEquilibrium& eq = unit().eq;
  const double dR = std::abs(eq.R_A - 1.0);
  double worst_ivp = 0.0, worst_volterra = 0.0;
  for (int n = 0; n <= 32; ++n) {
    const double u = oracle::mode_value(n, 1.0), du = oracle::mode_slope(n, 1.0);
    auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); };
    const ModeSolution a = solve_mode(n, eq, kId);
    const ModeSolution b = solve_mode_volterra(n, eq, kId);
    worst_ivp = std::max({worst_ivp, rel(a.u1, u), rel(a.du1, du)});
    worst_volterra = std::max({worst_volterra, rel(b.u1, u), rel(b.du1, du)});
  }
  return {dR <= 1e-8 && worst_ivp <= 1e-8 && worst_volterra <= 1e-8,
          "|R_A - 1| = " + sci(dR) + ", max rel err n <= 32: integrator " + sci(worst_ivp) + ", Volterra " +
              sci(worst_volterra)};
}

Outcome translation_mode() {
  std::vector<std::pair<double, NutrientFn>> cases;
  for (double A : {0.1, 0.3, 0.5, 0.7, 0.892779931793069}) cases.emplace_back(A, kId);
  for (auto [sigma, frac] : {std::pair{1.0, 0.3}, {1.0, 0.8}, {2.0, 0.5}, {4.0, 0.2}, {4.0, 0.9}})
    cases.emplace_back(frac * sigma / 2.0, NutrientFn::michaelis_menten(sigma));
  double worst = 0.0;
  for (const auto& [A, f] : cases) {
    const RadialEquilibrium eq = find_RA(A, f);
    const ModeSolution u1 = solve_mode(1, eq, f);
    worst = std::max(worst, std::abs(0.5 * A * u1.ratio() + A - f.value(1.0)));
  }
  return {worst <= 1e-7, "max |d_1| over " + std::to_string(cases.size()) + " (A, f) pairs: " + sci(worst)};
}

Outcome mode_estimates() {
  const RadialEquilibrium& eq = unit().eq;
  const auto modes = solve_modes(64, eq, kId);
  const double M = estimate_constant(eq, kId, modes[0].u1);
  const EstimateReport rep = verify_estimates(modes, M);
  // smallest k where the (2k+1)(2k+3) slope bound holds
  int first_ok = -1;
  double worst_ratio = 0.0;
  for (int k = 0; k <= 64; ++k) {
    const double bound = M / ((2.0 * k + 1) * (2.0 * k + 3));
    worst_ratio = std::max(worst_ratio, modes[k].du1 / bound);
    if (first_ok < 0 && modes[k].du1 <= bound) first_ok = k;
  }
  std::ostringstream os;
  os << "M = " << M << ", pointwise monotone " << (rep.pointwise_monotone ? "yes" : "no") << ", slope bound "
     << (rep.slope_bound ? "holds" : "violated") << " (max u_k'(1)/bound = " << worst_ratio
     << "), value bound " << (rep.value_bound ? "holds" : "violated") << ", u_k'(1) <= M/(2k+2) "
     << (rep.stated_slope_bound ? "holds" : "violated");
  return {rep.pointwise_monotone && rep.slope_bound && rep.value_bound, os.str()};
}

Outcome tail_monotonicity() {
  const SymbolTable& t = unit().table;
  const int k1 = find_k1(t);
  const SymbolTable wide = SymbolTable::assemble(unit().eq, kId, 128);
  const int k1_wide = find_k1(wide);
  bool increasing = true;
  for (int k = k1; k <= 63; ++k) increasing = increasing && bif_value(k, t) > 0.0 && bif_value(k, t) < bif_value(k + 1, t);
  const auto modes = solve_modes(65, unit().eq, kId);
  const double gap64 = 64.0 * (modes[64].du1 - modes[65].du1);
  const double gap16 = 16.0 * (modes[16].du1 - modes[17].du1);
  std::ostringstream os;
  os << "k1 = " << k1 << " (k_max 128: " << k1_wide << "), G_k increasing: " << (increasing ? "yes" : "no")
     << ", k(u_k'(1) - u_{k+1}'(1)) at k = 16: " << sci(gap16) << ", at k = 64: " << sci(gap64);
  return {k1 == k1_wide && increasing && gap64 < 1e-3, os.str()};
}

Outcome radius_monotone() {
  bool ok = true;
  double worst = 0.0;
  int cases = 0;
  for (const NutrientFn& f : {kId, NutrientFn::michaelis_menten(2.0)}) {
    const double f1 = f.value(1.0);
    double prev = INFINITY;
    for (int i = 0; i < 10; ++i) {
      const double A = f1 * (0.1 + 0.8 * (i + 0.5) / 10.0);
      const RadialEquilibrium eq = find_RA(A, f);
      ok = ok && eq.R_A < prev && eq.residual <= 1e-10;
      worst = std::max(worst, eq.residual);
      prev = eq.R_A;
      ++cases;
    }
  }
  return {ok, std::to_string(cases) + " values of A over two laws, strictly decreasing R_A, max residual " + sci(worst)};
}

Outcome multiplier() {
  const auto& [eq, t] = unit();
  double worst = 0.0;
  std::string where;
  for (int k : {0, 2, 3, 4, 5, 6})
    for (double G : {0.0, 5.0, 50.0}) {
      const MultiplierCheck mc = multiplier_check(G, k, 1e-4, t, eq, kId);
      if (mc.relative_error >= worst) {
        worst = mc.relative_error;
        where = "k = " + std::to_string(k) + ", G = " + std::to_string(static_cast<int>(G));
      }
    }
  double worst_k1 = 0.0;
  for (double G : {0.0, 5.0, 50.0}) {
    const MultiplierCheck mc = multiplier_check(G, 1, 1e-4, t, eq, kId);
    worst_k1 = std::max(worst_k1, std::abs(mc.measured) / (1e-4 * (1.0 + G)));
  }
  return {worst <= 1e-3 && worst_k1 <= 1.0,
          "max rel err " + sci(worst) + " (" + where + "), max |mu_1 measured| / (1e-4 (1+G)) = " + sci(worst_k1)};
}

Outcome trivial_branch() {
  double worst = 0.0;
  for (double G : {0.0, 10.0, 200.0})
    worst = std::max(worst, assemble_phi(G, ShapeCoeffs::zero(2, 3), unit().eq, kId).sup_norm());
  return {worst <= 1e-7, "max sup|Phi(G, 0)| = " + sci(worst)};
}

Outcome branch_asymptotics() {
  const auto& [eq, t] = unit();
  const BifurcationPoint bp = make_point(2, 1, t);
  const double G2 = oracle::bifurcation_value(2, 1.0);
  const Branch full = trace_branch(bp, 0.05, 10, eq, kId);
  const Branch half = trace_branch(bp, 0.025, 10, eq, kId);
  if (!full.warnings.empty() || !half.warnings.empty())
    return {false, "branch truncated: " + (full.warnings.empty() ? half.warnings : full.warnings).front()};
  double worst = 0.0;
  for (const Branch* b : {&full, &half})
    for (const auto& p : b->points) worst = std::max(worst, p.residual);
  const AsymptoticFit f_full = fit_asymptotics(full), f_half = fit_asymptotics(half);
  const double offset = std::abs(f_full.intercept - G2) / G2;
  const bool no_growth = f_full.quadratic_defect <= 1.1 * f_half.quadratic_defect;
  std::ostringstream os;
  os << "G_2 = " << G2 << ", intercept " << f_full.intercept << " (rel " << sci(offset) << "), max residual "
     << sci(worst) << ", defect " << f_full.quadratic_defect << " (eps_max 0.05) vs " << f_half.quadratic_defect
     << " (eps_max 0.025)";
  return {worst <= 1e-8 && offset <= 5e-3 && no_growth, os.str()};
}

Outcome subspace_closure() {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int l = 2 + trial % 3;
    ShapeCoeffs rho = ShapeCoeffs::zero(l, 4);
    for (int m = 0; m <= 4; ++m) rho.a[m] = u(rng) / (1.0 + m * m);
    const double s = sup_norm(rho);
    for (double& a : rho.a) a *= 0.05 / s;
    const double G = 200.0 * (0.5 + 0.5 * u(rng));
    FieldOptions opt;
    opt.grid = symmetric_grid(opt.grid, l);
    worst = std::max(worst, assemble_phi(G, rho, unit().eq, kId, opt).leakage(l));
  }
  return {worst <= 1e-7, "20 shapes with l in {2, 3, 4}, n_theta a multiple of 2l, max leakage " + sci(worst)};
}

Outcome non_bifurcation() {
  const auto& [eq, t] = unit();
  const auto pts = catalog(2, 3, t);
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double G = 0.5 * (pts[i].G + pts[i + 1].G);
    const ProbeResult r = non_bifurcation_probe(G, 2, t, eq, kId, 10, 1 + i);
    ok = ok && r.ok();
    os << (i ? ", " : "") << "G = " << G << ": " << r.returned_to_zero << "/" << r.attempts;
    if (r.inconclusive) os << " (inconclusive)";
  }
  return {ok, os.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s) to run (default: all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "bessel-oracle", bessel_oracle},
      {2, "translation-mode", translation_mode},
      {3, "mode-estimates", mode_estimates},
      {4, "tail-monotonicity", tail_monotonicity},
      {5, "radius-monotone", radius_monotone},
      {6, "multiplier", multiplier},
      {7, "trivial-branch", trivial_branch},
      {8, "branch-asymptotics", branch_asymptotics},
      {9, "subspace-closure", subspace_closure},
      {10, "non-bifurcation", non_bifurcation},
  };

  int failed = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-20s %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.passed;
  }
  return failed == 0 ? 0 : 1;
}
