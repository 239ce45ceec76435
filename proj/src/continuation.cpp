#include "tumorbif/continuation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "tumorbif/errors.hpp"

namespace tumorbif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int shape_order(int l, const ContinuationOptions& opt) {
  if (l < 1) throw DomainError("symmetry index l must be >= 1");
  // Anti-aliasing: n_theta >= 4 (K l + 1).
  const int limit = (opt.field.grid.n_theta / 4 - 1) / l;
  const int K = opt.K > 0 ? opt.K : std::min(12, limit);
  if (K < 1 || K > limit) {
    std::ostringstream os;
    os << "shape order K = " << K << " is outside [1, " << limit << "] for l = " << l
       << " and n_theta = " << opt.field.grid.n_theta;
    throw ConfigError(os.str());
  }
  return K;
}

namespace {

ContinuationOptions for_symmetry(const ContinuationOptions& opt, int l) {
  ContinuationOptions o = opt;
  o.field.grid = symmetric_grid(opt.field.grid, l);
  return o;
}

// Newton on a subset of the shape coefficients, optionally with G free.
struct System {
  int l;
  int K;
  std::vector<int> free_modes;
  bool G_free;
  const RadialEquilibrium& eq;
  const NutrientFn& f;
  const ContinuationOptions& opt;

  int size() const { return static_cast<int>(free_modes.size()) + (G_free ? 1 : 0); }

  VectorXd equations(const PhiTrace& phi) const {
    const std::vector<double> fam = phi.family(l);
    VectorXd F(K + 1);
    for (int m = 0; m <= K; ++m) F(m) = fam[m];
    return F;
  }

  PhiAffine evaluate(const ShapeCoeffs& rho) const {
    return assemble_phi_affine(rho, eq, f, opt.field);
  }

  MatrixXd jacobian(double G, const ShapeCoeffs& rho, const PhiAffine& base) const {
    const VectorXd F0 = equations(base.at(G));
    MatrixXd J(K + 1, size());
    int c = 0;
    if (G_free) J.col(c++) = equations(base.slope);
    std::vector<std::future<VectorXd>> cols;
    for (int m : free_modes) {
      cols.push_back(std::async(std::launch::async, [this, m, G, &rho] {
        ShapeCoeffs r = rho;
        r.a[m] += opt.fd_step;
        return equations(evaluate(r).at(G));
      }));
    }
    for (auto& fut : cols) J.col(c++) = (fut.get() - F0) / opt.fd_step;
    return J;
  }

  BranchPoint solve(double G, ShapeCoeffs rho, double eps, int polish_steps) const {
    PhiAffine aff = evaluate(rho);
    PhiTrace phi = aff.at(G);
    double res = phi.sup_norm();
    BranchPoint out{eps, G, rho, res, 0};
    if (!std::isfinite(res)) throw StepSizeError("Phi is not finite at the predictor");

    MatrixXd J;
    Eigen::JacobiSVD<MatrixXd> svd;
    VectorXd colscale;
    bool refresh = true;
    int polished = 0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
      if (res <= opt.tol && polished >= polish_steps) break;
      if (refresh) {
        J = jacobian(G, rho, aff);
        colscale = J.colwise().norm().transpose();
        for (int c = 0; c < colscale.size(); ++c)
          if (colscale(c) == 0.0) colscale(c) = 1.0;
        const MatrixXd Js = J * colscale.cwiseInverse().asDiagonal();
        svd.compute(Js, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double rcond = sv(sv.size() - 1) / sv(0);
        if (!(rcond > opt.singular_rcond)) {
          std::ostringstream os;
          os << "singular Jacobian at G = " << G << " (rcond " << rcond
             << "): collision with another bifurcation point or a fold";
          throw FoldError(os.str());
        }
        refresh = false;
      }
      const VectorXd dz = svd.solve(-equations(phi)).cwiseQuotient(colscale);
      int c = 0;
      double Gn = G;
      if (G_free) Gn += dz(c++);
      ShapeCoeffs rn = rho;
      for (int m : free_modes) rn.a[m] += dz(c++);

      PhiAffine an;
      try {
        an = evaluate(rn);
      } catch (const DomainError& e) {
        throw StepSizeError(std::string("Newton step left the admissible shapes (") + e.what() +
                            "); use a smaller amplitude step");
      }
      const PhiTrace pn = an.at(Gn);
      const double rn_res = pn.sup_norm();
      if (!std::isfinite(rn_res) || rn_res > 1e3 * std::max(res, opt.tol)) {
        std::ostringstream os;
        os << "Newton diverged (residual " << res << " -> " << rn_res
           << "); use a smaller amplitude step";
        throw StepSizeError(os.str());
      }
      if (res <= opt.tol) ++polished;
      if (rn_res > 0.25 * res && res > opt.tol) refresh = true;
      G = Gn;
      rho = std::move(rn);
      aff = std::move(an);
      phi = pn;
      res = rn_res;
      out.iterations = it;
    }
    if (!(res <= opt.tol)) {
      std::ostringstream os;
      os << "Newton did not reach tolerance " << opt.tol << " (residual " << res << " after "
         << opt.max_iterations << " iterations); use a smaller amplitude step";
      throw StepSizeError(os.str());
    }
    out.G = G;
    out.rho = std::move(rho);
    out.residual = res;
    return out;
  }
};

}  // namespace

BranchPoint newton_correct(double G0, const ShapeCoeffs& rho0, int k, double eps,
                           const RadialEquilibrium& eq, const NutrientFn& f,
                           const ContinuationOptions& user_opt) {
  const ContinuationOptions opt = for_symmetry(user_opt, rho0.l);
  const int K = rho0.K();
  if (k < 0 || k > K) throw RangeError("pinned mode index outside the shape truncation");
  if (K > shape_order(rho0.l, ContinuationOptions{opt.field, K}))
    throw ConfigError("shape truncation too large for the angular grid");
  ShapeCoeffs rho = rho0;
  rho.a[k] = eps;
  if (eps == 0.0) {
    // Trivial branch: radial state at any G.
    BranchPoint out{0.0, G0, ShapeCoeffs::zero(rho0.l, K), 0.0, 0};
    out.residual = assemble_phi(G0, out.rho, eq, f, opt.field).sup_norm();
    return out;
  }
  System sys{rho0.l, K, {}, true, eq, f, opt};
  for (int m = 0; m <= K; ++m)
    if (m != k) sys.free_modes.push_back(m);
  BranchPoint p = sys.solve(G0, std::move(rho), eps, 1);
  p.rho.a[k] = eps;
  return p;
}

Branch trace_branch(const BifurcationPoint& point, double eps_max, int n_steps,
                    const RadialEquilibrium& eq, const NutrientFn& f,
                    const ContinuationOptions& opt) {
  if (!(std::abs(eps_max) <= 0.2) || eps_max == 0.0)
    throw DomainError("eps_max must satisfy 0 < |eps_max| <= 0.2");
  if (n_steps < 1) throw DomainError("n_steps must be >= 1");
  const int K = shape_order(point.l, opt);
  if (point.k > K) throw RangeError("branch mode index exceeds the shape truncation");

  Branch br;
  br.l = point.l;
  br.k = point.k;
  br.G_kl = point.G;
  br.points.push_back(newton_correct(point.G, ShapeCoeffs::zero(point.l, K), point.k, 0.0, eq, f, opt));
  const double d_eps = eps_max / n_steps;
  for (int j = 1; j <= n_steps; ++j) {
    const BranchPoint& prev = br.points.back();
    const double eps = j * d_eps;
    ShapeCoeffs pred = prev.rho;
    pred.a[point.k] += d_eps;
    try {
      br.points.push_back(newton_correct(prev.G, pred, point.k, eps, eq, f, opt));
    } catch (const SolverError& e) {
      std::ostringstream os;
      os << "branch truncated at eps = " << eps << ": " << e.what();
      br.warnings.push_back(os.str());
      break;
    }
  }
  return br;
}

AsymptoticFit fit_asymptotics(const Branch& branch) {
  std::vector<const BranchPoint*> pts;
  for (const auto& p : branch.points)
    if (p.eps != 0.0) pts.push_back(&p);
  if (pts.size() < 5) throw DomainError("asymptotic fit needs at least 5 nontrivial branch points");

  MatrixXd X(pts.size(), 2);
  VectorXd y(pts.size());
  AsymptoticFit fit;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = pts[i]->eps;
    y(i) = pts[i]->G;
    ShapeCoeffs diff = pts[i]->rho;
    diff.a[branch.k] -= pts[i]->eps;
    fit.quadratic_defect =
        std::max(fit.quadratic_defect, sup_norm(diff) / (pts[i]->eps * pts[i]->eps));
  }
  const VectorXd c = X.colPivHouseholderQr().solve(y);
  fit.intercept = c(0);
  fit.slope_bound = std::abs(c(1));
  return fit;
}

std::vector<double> recheck_residuals(const Branch& branch, const RadialEquilibrium& eq,
                                      const NutrientFn& f, const FieldOptions& user_opt) {
  FieldOptions opt = user_opt;
  opt.grid = symmetric_grid(user_opt.grid, branch.l);
  std::vector<std::future<double>> jobs;
  for (const auto& p : branch.points)
    jobs.push_back(std::async(std::launch::async, [&p, &eq, &f, &opt] {
      return assemble_phi(p.G, p.rho, eq, f, opt).sup_norm();
    }));
  std::vector<double> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

ProbeResult non_bifurcation_probe(double G, int l, const SymbolTable& table,
                                  const RadialEquilibrium& eq, const NutrientFn& f, int attempts,
                                  std::uint64_t seed, const ContinuationOptions& user_opt,
                                  double amplitude) {
  const ContinuationOptions opt = for_symmetry(user_opt, l);
  const double Gb = g_bullet(table, find_k1(table));
  // G equal to the threshold is left to the singularity test below.
  if (!(G >= Gb * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "G = " << G << " is below the threshold " << Gb
       << ": outside the scope of the uniqueness statement";
    throw DomainError(os.str());
  }
  if (attempts < 1) throw DomainError("attempts must be >= 1");
  if (!(amplitude > 0.0 && amplitude < 0.05)) throw DomainError("amplitude must lie in (0, 0.05)");

  ProbeResult out;
  if (!is_isomorphism_at(G, l, table)) {
    out.inconclusive = true;
    return out;
  }
  const int K = shape_order(l, opt);
  System sys{l, K, {}, false, eq, f, opt};
  for (int m = 0; m <= K; ++m) sys.free_modes.push_back(m);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < attempts; ++t) {
    ShapeCoeffs rho = ShapeCoeffs::zero(l, K);
    for (double& a : rho.a) a = unif(rng);
    const double s = sup_norm(rho);
    for (double& a : rho.a) a *= amplitude / s;
    ++out.attempts;
    try {
      const BranchPoint p = sys.solve(G, rho, 0.0, 1);
      if (sup_norm(p.rho) <= 1e-3 * amplitude)
        ++out.returned_to_zero;
      else
        out.nonzero_solutions.push_back(p.rho);
    } catch (const SolverError& e) {
      out.failures.push_back(e.what());
    }
  }
  return out;
}

}  // namespace tumorbif
