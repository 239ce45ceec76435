#include "tumorbif/field_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tumorbif/errors.hpp"
#include "tumorbif/krylov.hpp"
#include "tumorbif/spectral.hpp"

namespace tumorbif {

using std::numbers::pi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd shift_half(const MatrixXd& U) {
  const int n = static_cast<int>(U.cols());
  const int h = n / 2;
  MatrixXd S(U.rows(), n);
  S.leftCols(n - h) = U.rightCols(n - h);
  S.rightCols(h) = U.leftCols(h);
  return S;
}

void check_grid(const FieldGridSize& g) {
  if (g.n_r < 32 || g.n_theta < 64 || g.n_theta % 2) {
    std::ostringstream os;
    os << "field grid " << g.n_r << " x " << g.n_theta
       << " is below the minimum 32 x 64 (or n_theta is odd)";
    throw DomainError(os.str());
  }
}

int wavenumber(int c, int n) { return c <= n / 2 ? c : c - n / 2; }

}  // namespace

FieldGridSize symmetric_grid(FieldGridSize grid, int l) {
  if (l < 1) throw DomainError("symmetry order must be positive");
  const int step = 2 * l;
  grid.n_theta = (grid.n_theta + step - 1) / step * step;
  return grid;
}

ChartLaplacian::ChartLaplacian(const ShapeCoeffs& rho, double R_A, FieldGridSize grid)
    : n_r_(grid.n_r), n_theta_(grid.n_theta) {
  if (n_r_ < 2 || n_theta_ < 4 || n_theta_ % 2) throw DomainError("invalid chart grid size");
  const int nc = 2 * n_r_;
  const VectorXd x = spectral::chebyshev_points(nc);
  const MatrixXd D = spectral::chebyshev_diff(nc);
  const MatrixXd D2 = D * D;
  sigma_.resize(n_r_);
  for (int i = 0; i < n_r_; ++i) sigma_[i] = x(i);
  sigma_[0] = 1.0;
  Dp_ = D.topLeftCorner(n_r_, n_r_);
  D2p_ = D2.topLeftCorner(n_r_, n_r_);
  Dm_.resize(n_r_, n_r_);
  D2m_.resize(n_r_, n_r_);
  for (int i = 0; i < n_r_; ++i)
    for (int k = 0; k < n_r_; ++k) {
      Dm_(i, k) = D(i, nc - 1 - k);
      D2m_(i, k) = D2(i, nc - 1 - k);
    }
  Dt_ = spectral::fourier_diff1(n_theta_);
  D2t_ = spectral::fourier_diff2(n_theta_);

  theta_.resize(n_theta_);
  const int n = n_theta_;
  s_.resize(n_r_, n);
  c_ss_.resize(n_r_, n);
  c_st_.resize(n_r_, n);
  c_tt_.resize(n_r_, n);
  c_s_.resize(n_r_, n);
  s_sig_.resize(n_r_, n);
  beta_.resize(n_r_, n);
  scale_.resize(n_r_, n);

  const double dt_norm = Dt_.row(0).cwiseAbs().sum();
  const double d2t_norm = D2t_.row(0).cwiseAbs().sum();
  const double R = R_A;
  for (int j = 0; j < n; ++j) {
    theta_[j] = 2.0 * pi * j / n;
    const ShapeValue e = eval_shape_even_part(rho, theta_[j]);
    const ShapeValue o = eval_shape_odd_part(rho, theta_[j]);
    for (int i = 0; i < n_r_; ++i) {
      const double sg = sigma_[i];
      const double s = R * sg * (1.0 + e.rho + sg * o.rho);
      const double ss = R * (1.0 + e.rho + 2.0 * sg * o.rho);
      const double st = R * sg * (e.d1 + sg * o.d1);
      const double sss = 2.0 * R * o.rho;
      const double sst = R * (e.d1 + 2.0 * sg * o.d1);
      const double stt = R * sg * (e.d2 + sg * o.d2);
      const double b = st / ss;
      const double b_s = (sst * ss - st * sss) / (ss * ss);
      const double b_t = (stt * ss - st * sst) / (ss * ss);
      const double s2 = s * s;
      s_(i, j) = s;
      s_sig_(i, j) = ss;
      beta_(i, j) = b;
      c_ss_(i, j) = 1.0 / (ss * ss) + b * b / s2;
      c_st_(i, j) = -2.0 * b / s2;
      c_tt_(i, j) = 1.0 / s2;
      c_s_(i, j) = -sss / (ss * ss * ss) + 1.0 / (s * ss) + (b * b_s - b_t) / s2;
      const double dn = Dp_.row(i).cwiseAbs().sum() + Dm_.row(i).cwiseAbs().sum();
      const double d2n = D2p_.row(i).cwiseAbs().sum() + D2m_.row(i).cwiseAbs().sum();
      scale_(i, j) = 1.0 + std::abs(c_ss_(i, j)) * d2n + std::abs(c_st_(i, j)) * dn * dt_norm +
                     std::abs(c_tt_(i, j)) * d2t_norm + std::abs(c_s_(i, j)) * dn;
    }
  }
  mean_radius_ = R * (1.0 + (rho.a.empty() ? 0.0 : rho.a[0]));

  basis_.resize(n, n);
  for (int c = 0; c < n; ++c) {
    const int m = wavenumber(c, n);
    for (int j = 0; j < n; ++j)
      basis_(j, c) = c <= n / 2 ? std::cos(m * theta_[j]) : std::sin(m * theta_[j]);
  }
  const VectorXd gram = (basis_.transpose() * basis_).diagonal();
  basis_pinv_ = gram.cwiseInverse().asDiagonal() * basis_.transpose();
}

MatrixXd ChartLaplacian::fold(const MatrixXd& plus, const MatrixXd& minus, const MatrixXd& U) const {
  MatrixXd out = plus * U;
  out.noalias() += minus * shift_half(U);
  return out;
}

MatrixXd ChartLaplacian::d_sigma(const MatrixXd& U) const { return fold(Dp_, Dm_, U); }

MatrixXd ChartLaplacian::d_theta(const MatrixXd& U) const { return U * Dt_.transpose(); }

MatrixXd ChartLaplacian::apply_radial(const VectorXd& u_sigma, const VectorXd& u_sigma2) const {
  return c_ss_.cwiseProduct(u_sigma2.replicate(1, n_theta_)) +
         c_s_.cwiseProduct(u_sigma.replicate(1, n_theta_));
}

MatrixXd ChartLaplacian::apply(const MatrixXd& U) const {
  const MatrixXd Ut = d_theta(U);
  MatrixXd L = c_ss_.cwiseProduct(fold(D2p_, D2m_, U));
  L += c_s_.cwiseProduct(fold(Dp_, Dm_, U));
  L += c_st_.cwiseProduct(fold(Dp_, Dm_, Ut));
  L += c_tt_.cwiseProduct(U * D2t_.transpose());
  return L;
}

void ChartLaplacian::boundary_gradient(const MatrixXd& U, std::vector<double>& d_r,
                                       std::vector<double>& d_theta_polar) const {
  const Eigen::RowVectorXd us = Dp_.row(0) * U + Dm_.row(0) * shift_half(U);
  const Eigen::RowVectorXd ut = U.row(0) * Dt_.transpose();
  d_r.resize(n_theta_);
  d_theta_polar.resize(n_theta_);
  for (int j = 0; j < n_theta_; ++j) {
    d_r[j] = us(j) / s_sig_(0, j);
    d_theta_polar[j] = ut(j) - beta_(0, j) * us(j);
  }
}

void ChartLaplacian::add_radial_boundary_gradient(double u_sigma, std::vector<double>& d_r,
                                                  std::vector<double>& d_theta_polar) const {
  for (int j = 0; j < n_theta_; ++j) {
    d_r[j] += u_sigma / s_sig_(0, j);
    d_theta_polar[j] -= beta_(0, j) * u_sigma;
  }
}

std::unique_ptr<ChartLaplacian::Preconditioner> ChartLaplacian::preconditioner(
    const std::vector<double>& reaction) const {
  return std::make_unique<Preconditioner>(*this, reaction);
}

ChartLaplacian::Preconditioner::Preconditioner(const ChartLaplacian& lap,
                                               const std::vector<double>& reaction)
    : lap_(&lap) {
  const int nr = lap.n_r_;
  const double inv_r2 = 1.0 / (lap.mean_radius_ * lap.mean_radius_);
  lu_.reserve(lap.n_theta_ / 2 + 1);
  for (int m = 0; m <= lap.n_theta_ / 2; ++m) {
    const double sign = (m % 2) ? -1.0 : 1.0;
    MatrixXd Am = inv_r2 * (lap.D2p_ + sign * lap.D2m_);
    const MatrixXd Dm = lap.Dp_ + sign * lap.Dm_;
    for (int i = 0; i < nr; ++i) {
      const double sg = lap.sigma_[i];
      Am.row(i) += inv_r2 / sg * Dm.row(i);
      Am(i, i) -= inv_r2 * m * m / (sg * sg) + reaction[i];
    }
    Am.row(0).setZero();
    Am(0, 0) = 1.0;
    lu_.emplace_back(Am);
  }
}

MatrixXd ChartLaplacian::Preconditioner::apply(const MatrixXd& R) const {
  const int n = lap_->n_theta_;
  MatrixXd C = R * lap_->basis_pinv_.transpose();
  for (int c = 0; c < n; ++c) C.col(c) = lu_[wavenumber(c, n)].solve(C.col(c));
  return C * lap_->basis_.transpose();
}

PhiTrace PhiTrace::from_values(std::vector<double> theta, std::vector<double> values) {
  PhiTrace t;
  const int n = static_cast<int>(values.size());
  t.theta = std::move(theta);
  t.values = std::move(values);
  t.cos_coeffs.assign(n / 2 + 1, 0.0);
  t.sin_coeffs.assign(n / 2 + 1, 0.0);
  for (int m = 0; m <= n / 2; ++m) {
    double c = 0.0;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = 2.0 * pi * static_cast<double>((static_cast<long>(m) * j) % n) / n;
      c += t.values[j] * std::cos(a);
      s += t.values[j] * std::sin(a);
    }
    const double w = (m == 0 || 2 * m == n) ? 1.0 / n : 2.0 / n;
    t.cos_coeffs[m] = w * c;
    t.sin_coeffs[m] = (m == 0 || 2 * m == n) ? 0.0 : w * s;
  }
  return t;
}

double PhiTrace::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> PhiTrace::family(int l) const {
  std::vector<double> out;
  for (int m = 0; m * l < static_cast<int>(cos_coeffs.size()); ++m) out.push_back(cos_coeffs[m * l]);
  return out;
}

double PhiTrace::leakage(int l) const {
  double inside = 0.0;
  double outside = 0.0;
  for (std::size_t m = 0; m < cos_coeffs.size(); ++m) {
    const double c = std::abs(cos_coeffs[m]);
    if (m % l == 0) inside = std::max(inside, c); else outside = std::max(outside, c);
    outside = std::max(outside, std::abs(sin_coeffs[m]));
  }
  const double top = std::max(inside, outside);
  return top > 0.0 ? outside / top : 0.0;
}

FieldSolution solve_nutrient(const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                             const NutrientFn& f, const FieldOptions& opt) {
  validate_shape(rho);
  check_grid(opt.grid);
  BoundaryGrid::build(rho, opt.grid.n_theta);
  const ChartLaplacian lap(rho, eq.R_A, opt.grid);
  const int nr = lap.n_r();
  const int nt = lap.n_theta();

  FieldSolution sol;
  sol.rho = rho;
  sol.sigma = lap.sigma();
  sol.theta = lap.theta();
  // psi = B + W with B(sigma) = v0(sigma). B's Laplacian is formed from the
  // exact derivatives of v0, so rounding in W scales with the deformation.
  VectorXd B(nr), Bs(nr), Bss(nr);
  for (int i = 0; i < nr; ++i) {
    const double sg = sol.sigma[i];
    B(i) = eq.v0(sg);
    Bs(i) = eq.dv0(sg);
    Bss(i) = eq.R_A * eq.R_A * f.value(std::max(B(i), 0.0)) - Bs(i) / sg;
  }
  B(0) = 1.0;
  const MatrixXd LB = lap.apply_radial(Bs, Bss);
  const MatrixXd Bfull = B.replicate(1, nt);
  MatrixXd W = MatrixXd::Zero(nr, nt);

  auto fval = [&f](double v) { return f.value(std::max(v, 0.0)); };
  auto fder = [&f](double v) { return f.derivative(std::max(v, 0.0)); };

  double last_step = std::numeric_limits<double>::infinity();
  double res = 0.0;
  for (int it = 0; it <= opt.newton_max_iterations; ++it) {
    const MatrixXd U = Bfull + W;
    MatrixXd F = LB + lap.apply(W) - U.unaryExpr(fval);
    F.row(0) = W.row(0);
    MatrixXd scaled = F.cwiseAbs().cwiseQuotient(lap.row_scale());
    scaled.row(0) = F.row(0).cwiseAbs();
    res = scaled.maxCoeff();
    sol.newton_history.push_back(res);
    if ((res <= opt.newton_tol && last_step <= 1e-11) || last_step <= 1e-15) break;
    if (it == opt.newton_max_iterations) break;

    const MatrixXd fp = U.unaryExpr(fder);
    std::vector<double> reaction(nr);
    for (int i = 0; i < nr; ++i) reaction[i] = fp.row(i).mean();
    const auto P = lap.preconditioner(reaction);
    auto J = [&](const VectorXd& v) -> VectorXd {
      const Eigen::Map<const MatrixXd> d(v.data(), nr, nt);
      MatrixXd out = lap.apply(d) - fp.cwiseProduct(d);
      out.row(0) = d.row(0);
      return Eigen::Map<const VectorXd>(out.data(), out.size());
    };
    auto M = [&](const VectorXd& v) -> VectorXd {
      const Eigen::Map<const MatrixXd> r(v.data(), nr, nt);
      const MatrixXd out = P->apply(r);
      return Eigen::Map<const VectorXd>(out.data(), out.size());
    };
    const VectorXd rhs = -Eigen::Map<const VectorXd>(F.data(), F.size());
    const double scale = rhs.cwiseAbs().maxCoeff();
    if (scale == 0.0) break;
    const krylov::GmresResult g = krylov::gmres(J, M, rhs, opt.linear_tol);
    const Eigen::Map<const MatrixXd> delta(g.x.data(), nr, nt);
    W += delta;
    last_step = delta.cwiseAbs().maxCoeff();
    sol.newton_iterations = it + 1;
  }
  sol.psi_residual = res;
  if (!(res <= opt.newton_tol)) {
    std::ostringstream os;
    os << "nutrient Newton iteration did not converge; residual history:";
    for (double h : sol.newton_history) os << ' ' << h;
    throw SolverError(os.str());
  }
  sol.psi = Bfull + W;
  sol.psi_correction = std::move(W);
  sol.base_slope = eq.slope_at_boundary();
  sol.max_principle = sol.psi.maxCoeff() <= 1.0 + 1e-10;
  return sol;
}

namespace {

// Harmonic function on the chart grid with the given boundary values.
MatrixXd harmonic_extension(const ChartLaplacian& lap, const std::vector<double>& data,
                            double linear_tol, double* residual) {
  const int nr = lap.n_r();
  const int nt = lap.n_theta();
  double mean = 0.0;
  double scale = 0.0;
  for (double d : data) {
    mean += d;
    scale = std::max(scale, std::abs(d));
  }
  mean /= nt;

  MatrixXd rhs = MatrixXd::Zero(nr, nt);
  for (int j = 0; j < nt; ++j) rhs(0, j) = data[j] - mean;
  const auto P = lap.preconditioner(std::vector<double>(nr, 0.0));
  auto L = [&](const VectorXd& v) -> VectorXd {
    const Eigen::Map<const MatrixXd> d(v.data(), nr, nt);
    MatrixXd out = lap.apply(d);
    out.row(0) = d.row(0);
    return Eigen::Map<const VectorXd>(out.data(), out.size());
  };
  auto M = [&](const VectorXd& v) -> VectorXd {
    const Eigen::Map<const MatrixXd> r(v.data(), nr, nt);
    const MatrixXd out = P->apply(r);
    return Eigen::Map<const VectorXd>(out.data(), out.size());
  };
  // Tolerance relative to the boundary data scale, not to the (possibly
  // vanishing) fluctuation about its mean.
  const double abs_tol = linear_tol * scale * std::sqrt(static_cast<double>(nt));
  const krylov::GmresResult g = krylov::gmres(
      L, M, Eigen::Map<const VectorXd>(rhs.data(), rhs.size()), linear_tol, abs_tol);
  if (!g.converged) {
    std::ostringstream os;
    os << "Laplace solve stalled at relative residual " << g.relative_residual;
    throw SolverError(os.str());
  }
  if (residual) *residual = g.relative_residual;
  MatrixXd out = Eigen::Map<const MatrixXd>(g.x.data(), nr, nt);
  out.array() += mean;
  return out;
}

std::vector<double> curvature_data(const ShapeCoeffs& rho, double R_A, const ChartLaplacian& lap) {
  std::vector<double> d(lap.n_theta());
  for (int j = 0; j < lap.n_theta(); ++j) d[j] = curvature(rho, R_A, lap.theta()[j]);
  return d;
}

std::vector<double> squared_radius_data(const ChartLaplacian& lap, double coef) {
  std::vector<double> d(lap.n_theta());
  for (int j = 0; j < lap.n_theta(); ++j) {
    const double rb = lap.radius(0, j);
    d[j] = coef * rb * rb;
  }
  return d;
}

// <grad U, grad N_rho> on the boundary nodes, U plus a function of sigma
// alone with boundary sigma-derivative base_slope.
std::vector<double> normal_flux(const ChartLaplacian& lap, const MatrixXd& U, const ShapeCoeffs& rho,
                                double R_A, double base_slope = 0.0) {
  std::vector<double> d_r, d_t;
  lap.boundary_gradient(U, d_r, d_t);
  if (base_slope != 0.0) lap.add_radial_boundary_gradient(base_slope, d_r, d_t);
  std::vector<double> out(lap.n_theta());
  for (int j = 0; j < lap.n_theta(); ++j) {
    const ShapeValue v = eval_shape(rho, lap.theta()[j]);
    const double w = v.d1 / (R_A * (1.0 + v.rho) * (1.0 + v.rho));
    out[j] = d_r[j] - w * d_t[j];
  }
  return out;
}

std::vector<double> nutrient_flux(const ChartLaplacian& lap, const FieldSolution& sol, double R_A) {
  if (sol.psi_correction.size() == sol.psi.size())
    return normal_flux(lap, sol.psi_correction, sol.rho, R_A, sol.base_slope);
  return normal_flux(lap, sol.psi, sol.rho, R_A);
}

}  // namespace

void solve_pressure(FieldSolution& sol, const RadialEquilibrium& eq, double G,
                    const FieldOptions& opt) {
  check_grid(opt.grid);
  const ChartLaplacian lap(sol.rho, eq.R_A, opt.grid);
  std::vector<double> data = curvature_data(sol.rho, eq.R_A, lap);
  const std::vector<double> sq = squared_radius_data(lap, -eq.A * G / 4.0);
  for (std::size_t j = 0; j < data.size(); ++j) data[j] += sq[j];
  sol.p = harmonic_extension(lap, data, opt.linear_tol, &sol.p_residual);
}

PhiTrace PhiAffine::at(double G) const {
  std::vector<double> v(offset.values.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = offset.values[j] + G * slope.values[j];
  return PhiTrace::from_values(offset.theta, std::move(v));
}

PhiAffine assemble_phi_affine(const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                              const NutrientFn& f, const FieldOptions& opt) {
  const FieldSolution sol = solve_nutrient(rho, eq, f, opt);
  const ChartLaplacian lap(rho, eq.R_A, opt.grid);
  const MatrixXd p_curv = harmonic_extension(lap, curvature_data(rho, eq.R_A, lap), opt.linear_tol, nullptr);
  const MatrixXd p_rate =
      harmonic_extension(lap, squared_radius_data(lap, -eq.A / 4.0), opt.linear_tol, nullptr);
  const std::vector<double> psi_flux = normal_flux(lap, sol.psi_correction, rho, eq.R_A, sol.base_slope);
  const std::vector<double> curv_flux = normal_flux(lap, p_curv, rho, eq.R_A);
  const std::vector<double> rate_flux = normal_flux(lap, p_rate, rho, eq.R_A);
  const int nt = lap.n_theta();
  std::vector<double> off(nt), slope(nt);
  for (int j = 0; j < nt; ++j) {
    off[j] = -curv_flux[j];
    slope[j] = psi_flux[j] - rate_flux[j] - eq.A * lap.radius(0, j) / 2.0;
  }
  PhiAffine out;
  out.offset = PhiTrace::from_values(lap.theta(), std::move(off));
  out.slope = PhiTrace::from_values(lap.theta(), std::move(slope));
  return out;
}

FieldSolution solve_fields(double G, const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                           const NutrientFn& f, const FieldOptions& opt) {
  FieldSolution sol = solve_nutrient(rho, eq, f, opt);
  solve_pressure(sol, eq, G, opt);
  return sol;
}

PhiTrace phi_from_fields(double G, const FieldSolution& sol, const RadialEquilibrium& eq,
                         const FieldOptions& opt) {
  const ChartLaplacian lap(sol.rho, eq.R_A, opt.grid);
  const std::vector<double> psi_flux = nutrient_flux(lap, sol, eq.R_A);
  const std::vector<double> p_flux = normal_flux(lap, sol.p, sol.rho, eq.R_A);
  std::vector<double> phi(lap.n_theta());
  for (int j = 0; j < lap.n_theta(); ++j)
    phi[j] = G * psi_flux[j] - p_flux[j] - eq.A * G * lap.radius(0, j) / 2.0;
  return PhiTrace::from_values(sol.theta, std::move(phi));
}

PhiTrace assemble_phi(double G, const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                      const NutrientFn& f, const FieldOptions& opt) {
  return phi_from_fields(G, solve_fields(G, rho, eq, f, opt), eq, opt);
}

MultiplierCheck multiplier_check(double G, int k, double eps, const SymbolTable& table,
                                 const RadialEquilibrium& eq, const NutrientFn& f,
                                 const FieldOptions& opt, double bound) {
  if (!(eps >= 1e-5 && eps <= 1e-2)) throw DomainError("multiplier step must lie in [1e-5, 1e-2]");
  if (k < 0) throw DomainError("mode index must be nonnegative");
  const ShapeCoeffs plus = k == 0 ? ShapeCoeffs::mode(1, 0, eps, 0) : ShapeCoeffs::mode(k, 1, eps, 1);
  ShapeCoeffs minus = plus;
  for (double& a : minus.a) a = -a;
  const PhiTrace up = assemble_phi(G, plus, eq, f, opt);
  const PhiTrace down = assemble_phi(G, minus, eq, f, opt);
  std::vector<double> q(up.values.size());
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = (up.values[j] - down.values[j]) / (2.0 * eps);
  const PhiTrace dq = PhiTrace::from_values(up.theta, std::move(q));

  MultiplierCheck out;
  out.measured = dq.cos_coeffs.at(k) / eq.R_A;
  out.reference = mu(k, G, table);
  const double err = std::abs(out.measured - out.reference);
  out.relative_error = std::abs(out.reference) > 1e-10 ? err / std::abs(out.reference) : err;
  for (std::size_t m = 0; m < dq.cos_coeffs.size(); ++m) {
    if (static_cast<int>(m) != k) out.leakage = std::max(out.leakage, std::abs(dq.cos_coeffs[m]));
    out.leakage = std::max(out.leakage, std::abs(dq.sin_coeffs[m]));
  }
  out.passed = out.relative_error <= bound;
  return out;
}

}  // namespace tumorbif
