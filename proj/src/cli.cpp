#include "tumorbif/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"
#include "tumorbif/checks.hpp"
#include "tumorbif/continuation.hpp"
#include "tumorbif/errors.hpp"
#include "tumorbif/field_solver.hpp"
#include "tumorbif/io.hpp"
#include "tumorbif/mode_ode.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"
#include "tumorbif/version.hpp"

namespace tumorbif::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

// Flag values land here; each is copied into the RunConfig only when the
// flag was given, so flags override the config file.
struct Flags {
  std::string config;
  std::string out_dir;
  double A = 0, G = 0, sigma = 1;
  std::string f;
  int radial_grid = 0, n_r = 0, n_theta = 0, K = 0, k_max = 0;
  double ode_tol = 0, field_tol = 0, linear_tol = 0, continuation_tol = 0;
  int l = 0, k = 0, count = 0, steps = 0;
  double eps_max = 0, fd_eps = 0, multiplier_bound = 0;
  std::vector<std::string> branches;
};

template <class T>
void apply_if(const CLI::Option* opt, const T& value, T& target) {
  if (opt && opt->count() > 0) target = value;
}

class Session {
 public:
  Session(io::RunConfig cfg, std::string command, std::ostream& out)
      : cfg_(std::move(cfg)), command_(std::move(command)), out_(out),
        start_(std::chrono::steady_clock::now()) {}

  const io::RunConfig& cfg() const { return cfg_; }
  std::ostream& out() { return out_; }
  fs::path path(const std::string& name) const { return fs::path(cfg_.out_dir) / name; }

  const NutrientFn& f() {
    if (!f_) f_ = cfg_.model.nutrient();
    return *f_;
  }
  const RadialEquilibrium& eq() {
    if (!eq_) eq_ = find_RA(cfg_.model.resolved_A(), f(), cfg_.radial_options());
    return *eq_;
  }
  const std::vector<ModeSolution>& modes() {
    if (!modes_) modes_ = solve_modes(cfg_.numerics.k_max, eq(), f());
    return *modes_;
  }
  const SymbolTable& table() {
    if (!table_) table_ = SymbolTable::from_modes(eq(), f(), modes());
    return *table_;
  }

  void write(const std::string& name, Json payload) const {
    io::ResultFile r;
    r.command = command_;
    r.config = io::to_json(cfg_);
    r.payload = std::move(payload);
    r.provenance.n_r = cfg_.numerics.n_r;
    r.provenance.n_theta = cfg_.numerics.n_theta;
    r.provenance.radial_grid = cfg_.numerics.radial_grid;
    r.provenance.tolerances = {{"ode_tol", cfg_.numerics.ode_tol},
                               {"field_tol", cfg_.numerics.field_tol},
                               {"linear_tol", cfg_.numerics.linear_tol},
                               {"continuation_tol", cfg_.numerics.continuation_tol}};
    r.provenance.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    r.provenance.library_version = kVersion;
    io::write_result(r, path(name));
  }

 private:
  io::RunConfig cfg_;
  std::string command_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::optional<NutrientFn> f_;
  std::optional<RadialEquilibrium> eq_;
  std::optional<std::vector<ModeSolution>> modes_;
  std::optional<SymbolTable> table_;
};

Json point_json(const BifurcationPoint& p, const SymbolTable& t) {
  return {{"mode", p.mode}, {"l", p.l},         {"k", p.k},
          {"G", p.G},       {"transversality", -t.denom.at(p.mode)},
          {"within_theorem", p.within_theorem}};
}

int cmd_radial(Session& s) {
  const RadialEquilibrium& eq = s.eq();
  s.out() << std::setprecision(12) << "R_A = " << eq.R_A << "\nv0(0) = " << eq.c_A
          << "\nresidual = " << eq.residual << '\n';
  std::vector<std::vector<double>> rows;
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    rows.push_back({x, x * eq.R_A, eq.v0(x), eq.dv0(x) / eq.R_A});
  }
  io::write_csv(s.path("radial_profile.csv"), {"s", "r", "psi", "dpsi_dr"}, rows);
  s.write("radial.json", {{"A", eq.A}, {"R_A", eq.R_A}, {"c_A", eq.c_A}, {"residual", eq.residual}});
  return kExitOk;
}

int cmd_modes(Session& s) {
  const auto& modes = s.modes();
  const SymbolTable& t = s.table();
  std::vector<std::vector<double>> rows;
  Json list = Json::array();
  for (const auto& m : modes) {
    rows.push_back({double(m.n), m.u1, m.du1, m.ratio(), t.denom[m.n]});
    list.push_back({{"n", m.n}, {"u1", m.u1}, {"du1", m.du1}, {"d", t.denom[m.n]}});
  }
  io::write_csv(s.path("modes.csv"), {"n", "u_1", "du_1", "ratio", "d"}, rows);
  const EstimateReport rep = verify_estimates(modes, estimate_constant(s.eq(), s.f(), modes[0].u1));
  s.write("modes.json", {{"modes", list},
                         {"M", rep.M},
                         {"pointwise_monotone", rep.pointwise_monotone},
                         {"slope_bound", rep.slope_bound},
                         {"value_bound", rep.value_bound},
                         {"limit_trend", rep.limit_trend},
                         {"violations", rep.violations}});
  s.out() << "modes 0.." << modes.back().n << " written; M = " << rep.M
          << (rep.ok() ? "; a-priori bounds hold" : "; a-priori bounds violated") << '\n';
  for (const auto& v : rep.violations) s.out() << "  " << v << '\n';
  return kExitOk;
}

int cmd_spectrum(Session& s) {
  const SymbolTable& t = s.table();
  const int k1 = find_k1(t);
  const double Gb = g_bullet(t, k1);
  const bool feri = check_feri(t);
  std::vector<std::vector<double>> rows;
  const std::optional<double> G = s.cfg().model.G;
  for (int k = 0; k <= t.k_max(); ++k) {
    const double Gk = k >= 2 ? bif_value(k, t) : std::nan("");
    std::vector<double> row{double(k), t.denom[k], Gk};
    if (G) row.push_back(mu(k, *G, t));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header{"k", "d", "G_k"};
  if (G) header.push_back("mu_k");
  io::write_csv(s.path("spectrum.csv"), header, rows);
  s.out() << std::setprecision(10) << "k1 = " << k1 << "\nG_bullet = " << Gb
          << "\nmode 0 nondegenerate: " << (feri ? "yes" : "no") << '\n';
  s.write("spectrum.json", {{"k1", k1}, {"G_bullet", Gb}, {"mode0_nondegenerate", feri}, {"d", t.denom}});
  return feri ? kExitOk : kExitCheckFailed;
}

int cmd_bifpoints(Session& s) {
  const SymbolTable& t = s.table();
  const auto pts = catalog(s.cfg().task.l, s.cfg().task.count, t);
  std::vector<std::vector<double>> rows;
  Json list = Json::array();
  s.out() << std::setprecision(10) << "mode l k G\n";
  for (const auto& p : pts) {
    rows.push_back({double(p.mode), double(p.l), double(p.k), p.G, -t.denom[p.mode]});
    list.push_back(point_json(p, t));
    s.out() << p.mode << ' ' << p.l << ' ' << p.k << ' ' << p.G << '\n';
  }
  io::write_csv(s.path("bifpoints.csv"), {"mode", "l", "k", "G", "transversality"}, rows);
  const int k1 = find_k1(t);
  s.write("bifpoints.json", {{"k1", k1}, {"G_bullet", g_bullet(t, k1)}, {"points", list}});
  if (static_cast<int>(pts.size()) < s.cfg().task.count) {
    s.out() << "only " << pts.size() << " points below k_max = " << t.k_max() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_verify_multiplier(Session& s) {
  if (!s.cfg().model.G) throw ConfigError("verify-multiplier needs --G");
  const double G = *s.cfg().model.G;
  const int k = s.cfg().task.k;
  const MultiplierCheck mc = multiplier_check(G, k, s.cfg().task.fd_eps, s.table(), s.eq(), s.f(),
                                              s.cfg().field_options(), s.cfg().task.multiplier_bound);
  s.out() << std::setprecision(10) << "k = " << k << ", G = " << G << "\nmeasured  = " << mc.measured
          << "\nreference = " << mc.reference << "\nrelative error = " << mc.relative_error
          << " (bound " << s.cfg().task.multiplier_bound << ")\n"
          << (mc.passed ? "PASS" : "FAIL") << '\n';
  s.write("multiplier.json", {{"k", k},
                              {"G", G},
                              {"measured", mc.measured},
                              {"reference", mc.reference},
                              {"relative_error", mc.relative_error},
                              {"leakage", mc.leakage},
                              {"passed", mc.passed}});
  return mc.passed ? kExitOk : kExitCheckFailed;
}

int cmd_trace(Session& s) {
  const auto& task = s.cfg().task;
  const BifurcationPoint pt = make_point(task.l, task.k, s.table());
  if (!pt.within_theorem)
    s.out() << "note: mode " << pt.mode << " lies outside the hypotheses (G <= G_bullet or mode <= k1)\n";
  const ContinuationOptions copt = s.cfg().continuation_options();
  const Branch br = trace_branch(pt, task.eps_max, task.steps, s.eq(), s.f(), copt);

  std::vector<std::vector<double>> rows;
  s.out() << std::setprecision(10) << "eps G residual\n";
  for (const auto& p : br.points) {
    rows.push_back({p.eps, p.G, p.residual});
    s.out() << p.eps << ' ' << p.G << ' ' << p.residual << '\n';
  }
  for (const auto& w : br.warnings) s.out() << "warning: " << w << '\n';
  const std::string stem = "branch_l" + std::to_string(task.l) + "_k" + std::to_string(task.k);
  io::write_csv(s.path(stem + ".csv"), {"eps", "G", "residual"}, rows);
  io::emit_outlines(br, s.eq().R_A, s.path(stem + "_outlines.svg"));

  Json payload{{"branch", io::to_json(br)},
               {"within_theorem", pt.within_theorem},
               {"field_n_theta", symmetric_grid(copt.field.grid, task.l).n_theta}};
  if (std::count_if(br.points.begin(), br.points.end(), [](const BranchPoint& p) { return p.eps != 0.0; }) >= 5) {
    const AsymptoticFit fit = fit_asymptotics(br);
    payload["fit"] = {{"intercept", fit.intercept},
                      {"slope_bound", fit.slope_bound},
                      {"quadratic_defect", fit.quadratic_defect}};
    s.out() << "fit: G(0) = " << fit.intercept << " (G_kl = " << pt.G << "), |slope| = " << fit.slope_bound
            << ", quadratic defect = " << fit.quadratic_defect << '\n';
  }
  s.write(stem + ".json", payload);
  const bool ok = br.warnings.empty() &&
                  std::all_of(br.points.begin(), br.points.end(),
                              [&](const BranchPoint& p) { return p.residual <= copt.tol; });
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_diagram(Session& s) {
  const auto pts = catalog(s.cfg().task.l, s.cfg().task.count, s.table());
  std::vector<io::DiagramBranch> branches;
  for (const auto& file : s.cfg().task.branch_files) {
    const io::ResultFile r = io::read_result(file);
    if (!r.payload.contains("branch")) throw ConfigError(file + " holds no branch record");
    io::DiagramBranch db{io::branch_from_json(r.payload["branch"]), fs::path(file).stem().string()};
    io::emit_outlines(db.branch, s.eq().R_A, s.path(db.label + "_outlines.svg"));
    branches.push_back(std::move(db));
  }
  std::vector<BifurcationPoint> marks = pts;
  for (const auto& b : branches) {
    const bool listed = std::any_of(marks.begin(), marks.end(), [&](const BifurcationPoint& p) {
      return p.mode == b.branch.k * b.branch.l;
    });
    if (!listed) marks.push_back(make_point(b.branch.l, b.branch.k, s.table()));
  }
  io::emit_diagram(marks, branches, s.path("diagram.svg"));
  Json list = Json::array();
  for (const auto& p : marks) list.push_back(point_json(p, s.table()));
  s.write("diagram.json", {{"points", list}, {"branches", s.cfg().task.branch_files}});
  s.out() << "diagram with " << marks.size() << " points and " << branches.size()
          << " branches written to " << s.path("diagram.svg").string() << '\n';
  return kExitOk;
}

int cmd_check_all(Session& s) {
  const auto results = run_property_suite(s.cfg());
  Json list = Json::array();
  int failed = 0;
  for (const auto& r : results) {
    s.out() << (r.passed ? "PASS " : "FAIL ") << r.name << " -- " << r.detail << '\n';
    list.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    failed += r.passed ? 0 : 1;
  }
  s.out() << results.size() - failed << '/' << results.size() << " checks passed\n";
  s.write("check_all.json", {{"checks", list}, {"failed", failed}});
  return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bifurcation analysis of radial free-boundary tumor equilibria", "tumorbif"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags fl;

  app.add_option("--config", fl.config, "JSON config file (flags override it)")
                       ->check(CLI::ExistingFile);
  auto* o_out = app.add_option("--out", fl.out_dir,
                               std::string("result directory (default: $") + io::kResultDirEnv +
                                   " or ./results)");
  auto* o_A = app.add_option("--A", fl.A, "apoptosis parameter A, 0 < A < f(1)");
  auto* o_G = app.add_option("--G", fl.G, "growth parameter G");
  auto* o_f = app.add_option("--f", fl.f, "nutrient law")
                  ->check(CLI::IsMember({"identity", "michaelis_menten"}));
  auto* o_sigma = app.add_option("--sigma", fl.sigma, "Michaelis-Menten constant");
  auto* o_rg = app.add_option("--radial-grid", fl.radial_grid, "Chebyshev nodes for v0");
  auto* o_nr = app.add_option("--n-r", fl.n_r, "radial collocation nodes of the field solver");
  auto* o_nt = app.add_option("--n-theta", fl.n_theta, "angular collocation nodes (even)");
  auto* o_K = app.add_option("--shape-order", fl.K, "shape truncation K (0: automatic)");
  auto* o_kmax = app.add_option("--k-max", fl.k_max, "highest tabulated mode");
  auto* o_odet = app.add_option("--ode-tol", fl.ode_tol);
  auto* o_ft = app.add_option("--field-tol", fl.field_tol);
  auto* o_lt = app.add_option("--linear-tol", fl.linear_tol);
  auto* o_ct = app.add_option("--continuation-tol", fl.continuation_tol);
  app.fallthrough();

  auto* radial = app.add_subcommand("radial", "radial equilibrium and its profile");
  auto* modes = app.add_subcommand("modes", "mode family u_n at the boundary");
  auto* spectrum = app.add_subcommand("spectrum", "symbol denominators, bifurcation values, k1, G_bullet");
  auto* bif = app.add_subcommand("bifpoints", "catalog of bifurcation points");
  CLI::Option *o_l = nullptr, *o_count = nullptr, *o_k = nullptr, *o_eps = nullptr,
              *o_steps = nullptr, *o_fd = nullptr, *o_bound = nullptr, *o_br = nullptr,
              *o_l2 = nullptr, *o_count2 = nullptr, *o_l3 = nullptr;
  o_l = bif->add_option("--l", fl.l, "symmetry index");
  o_count = bif->add_option("--count", fl.count, "number of points");
  auto* vm = app.add_subcommand("verify-multiplier", "finite-difference check of the symbol");
  auto* o_k_vm = vm->add_option("--k", fl.k, "mode")->required();
  vm->add_option("--G", fl.G, "growth parameter")->required();
  o_fd = vm->add_option("--eps", fl.fd_eps, "perturbation amplitude");
  o_bound = vm->add_option("--bound", fl.multiplier_bound, "relative error bound");
  auto* trace = app.add_subcommand("trace", "continue a bifurcating branch in its amplitude");
  o_l3 = trace->add_option("--l", fl.l, "symmetry index")->required();
  o_k = trace->add_option("--k", fl.k, "branch leaves along cos(k l s)")->required();
  o_eps = trace->add_option("--eps-max", fl.eps_max, "final amplitude, |eps| <= 0.2")->required();
  o_steps = trace->add_option("--steps", fl.steps, "number of amplitude steps")->required();
  auto* diagram = app.add_subcommand("diagram", "SVG bifurcation diagram and domain outlines");
  o_l2 = diagram->add_option("--l", fl.l, "symmetry index of the catalog");
  o_count2 = diagram->add_option("--count", fl.count, "catalog points to mark");
  o_br = diagram->add_option("--branch", fl.branches, "branch result files from trace");
  auto* check = app.add_subcommand("check-all", "property suite over all solver modules");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    io::RunConfig cfg;
    if (!fl.config.empty()) cfg = io::load_config(fl.config, cfg);
    if (const char* env = std::getenv(io::kResultDirEnv); env && *env) cfg.out_dir = env;
    apply_if(o_out, fl.out_dir, cfg.out_dir);
    apply_if(o_A, fl.A, cfg.model.A);
    if (o_G->count() > 0 || vm->get_option("--G")->count() > 0) cfg.model.G = fl.G;
    apply_if(o_f, fl.f, cfg.model.f_kind);
    apply_if(o_sigma, fl.sigma, cfg.model.sigma);
    apply_if(o_rg, fl.radial_grid, cfg.numerics.radial_grid);
    apply_if(o_nr, fl.n_r, cfg.numerics.n_r);
    apply_if(o_nt, fl.n_theta, cfg.numerics.n_theta);
    apply_if(o_K, fl.K, cfg.numerics.K);
    apply_if(o_kmax, fl.k_max, cfg.numerics.k_max);
    apply_if(o_odet, fl.ode_tol, cfg.numerics.ode_tol);
    apply_if(o_ft, fl.field_tol, cfg.numerics.field_tol);
    apply_if(o_lt, fl.linear_tol, cfg.numerics.linear_tol);
    apply_if(o_ct, fl.continuation_tol, cfg.numerics.continuation_tol);
    for (auto* o : {o_l, o_l2, o_l3}) apply_if(o, fl.l, cfg.task.l);
    for (auto* o : {o_count, o_count2}) apply_if(o, fl.count, cfg.task.count);
    apply_if(o_k, fl.k, cfg.task.k);
    apply_if(o_k_vm, fl.k, cfg.task.k);
    apply_if(o_eps, fl.eps_max, cfg.task.eps_max);
    apply_if(o_steps, fl.steps, cfg.task.steps);
    apply_if(o_fd, fl.fd_eps, cfg.task.fd_eps);
    apply_if(o_bound, fl.multiplier_bound, cfg.task.multiplier_bound);
    apply_if(o_br, fl.branches, cfg.task.branch_files);
    cfg.validate();

    CLI::App* sub = app.get_subcommands().front();
    Session s(cfg, sub->get_name(), out);
    if (sub == radial) return cmd_radial(s);
    if (sub == modes) return cmd_modes(s);
    if (sub == spectrum) return cmd_spectrum(s);
    if (sub == bif) return cmd_bifpoints(s);
    if (sub == vm) return cmd_verify_multiplier(s);
    if (sub == trace) return cmd_trace(s);
    if (sub == diagram) return cmd_diagram(s);
    if (sub == check) return cmd_check_all(s);
    err << "unhandled subcommand\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace tumorbif::cli
