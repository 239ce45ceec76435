#include "tumorbif/mode_ode.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <future>
#include <sstream>

#include "tumorbif/errors.hpp"
#include "tumorbif/spectral.hpp"

namespace tumorbif {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

constexpr double kSeriesRadius = 1e-3;

std::vector<double> uniform_grid(int n) {
  if (n < 2) throw DomainError("mode grid needs at least two points");
  std::vector<double> r(n);
  for (int j = 0; j < n; ++j) r[j] = static_cast<double>(j) / (n - 1);
  r.back() = 1.0;
  return r;
}

bool is_zero(const ModeCoefficient& q) { return q.q0 == 0.0 && q.q_max == 0.0; }

ModeSolution trivial_solution(int n, int grid_size) {
  ModeSolution s;
  s.n = n;
  s.u1 = 1.0;
  s.du1 = 0.0;
  s.r = uniform_grid(grid_size);
  s.profile.assign(s.r.size(), 1.0);
  return s;
}

void require_monotone(const ModeSolution& s) {
  for (std::size_t j = 1; j < s.profile.size(); ++j)
    if (s.profile[j] < s.profile[j - 1] - 1e-14 * s.profile[j - 1]) {
      std::ostringstream os;
      os << "mode " << s.n << " profile is not increasing near r = " << s.r[j];
      throw SolverError(os.str());
    }
}

}  // namespace

ModeCoefficient ModeCoefficient::from(const RadialEquilibrium& eq, const NutrientFn& f) {
  ModeCoefficient c;
  const double R2 = eq.R_A * eq.R_A;
  if (f.kind() == NutrientFn::Kind::Identity) return constant(R2);
  constexpr int kNodes = 96;
  std::vector<double> x = spectral::ChebyshevInterpolant::nodes(kNodes, 0.0, 1.0);
  std::vector<double> y(kNodes);
  for (int j = 0; j < kNodes; ++j) y[j] = R2 * eval_f_prime(f, eq.v0(x[j]));
  spectral::ChebyshevInterpolant interp(0.0, 1.0, y);
  c.q0 = y.front();
  c.q_max = 0.0;
  for (int j = 0; j <= 2000; ++j) c.q_max = std::max(c.q_max, interp(j / 2000.0));
  c.q_max = std::max(c.q_max, *std::max_element(y.begin(), y.end()));
  c.q = [interp = std::move(interp)](double r) { return interp(r); };
  return c;
}

ModeCoefficient ModeCoefficient::constant(double value) {
  ModeCoefficient c;
  c.q0 = value;
  c.q_max = value;
  c.q = [value](double) { return value; };
  return c;
}

ModeSolution solve_mode(int n, const ModeCoefficient& q, const ModeOptions& opt) {
  if (n < 0) throw DomainError("mode index must be nonnegative");
  if (is_zero(q)) return trivial_solution(n, opt.grid_size);

  const double k = 2.0 * n + 1.0;
  auto rhs = [&](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = q.q(r) * y[0] - k / r * y[1];
  };

  // u = 1 + a r^2 + b r^4 near the origin; q is even in r.
  const double h = 1e-2;
  const double q2 = (q.q(h) - q.q0) / (h * h);
  const double a = q.q0 / (4.0 * (n + 1));
  const double b = (q.q0 * a + q2) / (8.0 * (n + 2));
  const double r0 = kSeriesRadius;
  State y{1.0 + a * r0 * r0 + b * std::pow(r0, 4), 2.0 * a * r0 + 4.0 * b * std::pow(r0, 3)};

  ModeSolution s;
  s.n = n;
  s.r = uniform_grid(opt.grid_size);
  s.profile.assign(s.r.size(), 1.0);

  std::vector<double> times{r0};
  for (double r : s.r)
    if (r > r0) times.push_back(r);
  std::vector<State> states;
  states.reserve(times.size());
  auto stepper = odeint::make_controlled(opt.ode_tol, opt.ode_tol,
                                         odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-5,
                          [&](const State& x, double) { states.push_back(x); });

  std::size_t next = 1;
  for (std::size_t j = 0; j < s.r.size(); ++j) {
    const double r = s.r[j];
    if (r <= r0) {
      s.profile[j] = 1.0 + a * r * r + b * std::pow(r, 4);
    } else {
      s.profile[j] = states.at(next++)[0];
    }
  }
  s.u1 = states.back()[0];
  s.du1 = states.back()[1];
  s.profile.back() = s.u1;
  require_monotone(s);
  return s;
}

ModeSolution solve_mode(int n, const RadialEquilibrium& eq, const NutrientFn& f,
                        const ModeOptions& opt) {
  return solve_mode(n, ModeCoefficient::from(eq, f), opt);
}

double mode_ratio(int n, const RadialEquilibrium& eq, const NutrientFn& f, const ModeOptions& opt) {
  return solve_mode(n, eq, f, opt).ratio();
}

ModeSolution solve_mode_volterra(int n, const ModeCoefficient& q, const VolterraOptions& opt) {
  if (n < 0) throw DomainError("mode index must be nonnegative");
  if (is_zero(q)) return trivial_solution(n, opt.grid_size);

  const int N = opt.nodes;
  const std::vector<double> x = spectral::ChebyshevInterpolant::nodes(N, 0.0, 1.0);

  // Barycentric row for evaluating a node-valued function at point t.
  std::vector<double> bw(N);
  for (int j = 0; j < N; ++j) bw[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N - 1) ? 0.5 : 1.0);
  auto bary_row = [&](double t) {
    std::vector<double> row(N, 0.0);
    double den = 0.0;
    for (int j = 0; j < N; ++j) {
      const double d = t - x[j];
      if (d == 0.0) {
        std::fill(row.begin(), row.end(), 0.0);
        row[j] = 1.0;
        return row;
      }
      row[j] = bw[j] / d;
      den += row[j];
    }
    for (double& v : row) v /= den;
    return row;
  };

  // h(s) = s int_0^1 t^(2n+1) q(s t) u(s t) dt, so that u' = h and u(r) = 1 + int_0^r h.
  const spectral::Quadrature inner = spectral::gauss_legendre(n + 40, 0.0, 1.0);
  const spectral::Quadrature outer = spectral::gauss_legendre(40, 0.0, 1.0);
  const int Qi = static_cast<int>(inner.nodes.size());
  const int Qo = static_cast<int>(outer.nodes.size());

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);  // h = H u
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, N);  // u - 1 = U h
  for (int i = 0; i < N; ++i) {
    const double s = x[i];
    for (int p = 0; p < Qi; ++p) {
      const double t = inner.nodes[p];
      const double w = s * inner.weights[p] * std::pow(t, 2 * n + 1) * q.q(s * t);
      if (w == 0.0) continue;
      const std::vector<double> row = bary_row(s * t);
      for (int j = 0; j < N; ++j) H(i, j) += w * row[j];
    }
    for (int p = 0; p < Qo; ++p) {
      const std::vector<double> row = bary_row(s * outer.nodes[p]);
      for (int j = 0; j < N; ++j) U(i, j) += s * outer.weights[p] * row[j];
    }
  }
  const Eigen::MatrixXd picard = U * H;

  Eigen::VectorXd u = Eigen::VectorXd::Ones(N);
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::VectorXd next = picard * u;
    next.array() += 1.0;
    const double change = (next - u).cwiseAbs().maxCoeff();
    u = std::move(next);
    if (change <= opt.tol * u.cwiseAbs().maxCoeff()) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "Picard iteration for mode " << n << " did not converge in " << opt.max_iterations
       << " iterations";
    throw SolverError(os.str());
  }
  const Eigen::VectorXd h = H * u;

  ModeSolution sol;
  sol.n = n;
  sol.u1 = u(N - 1);
  sol.du1 = h(N - 1);
  sol.r = uniform_grid(opt.grid_size);
  std::vector<double> values(u.data(), u.data() + N);
  const spectral::ChebyshevInterpolant interp(0.0, 1.0, std::move(values));
  sol.profile.resize(sol.r.size());
  for (std::size_t j = 0; j < sol.r.size(); ++j) sol.profile[j] = interp(sol.r[j]);
  return sol;
}

ModeSolution solve_mode_volterra(int n, const RadialEquilibrium& eq, const NutrientFn& f,
                                 const VolterraOptions& opt) {
  return solve_mode_volterra(n, ModeCoefficient::from(eq, f), opt);
}

std::vector<ModeSolution> solve_modes(int k_max, const RadialEquilibrium& eq, const NutrientFn& f,
                                      const ModeOptions& opt) {
  if (k_max < 0) throw DomainError("k_max must be nonnegative");
  const ModeCoefficient q = ModeCoefficient::from(eq, f);
  std::vector<std::future<ModeSolution>> tasks;
  tasks.reserve(k_max + 1);
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<ModeSolution> out;
  out.reserve(k_max + 1);
  // Launch in batches of `workers` so the pool never oversubscribes.
  for (int start = 0; start <= k_max; start += static_cast<int>(workers)) {
    const int stop = std::min(k_max + 1, start + static_cast<int>(workers));
    if (workers == 1) {
      for (int n = start; n < stop; ++n) out.push_back(solve_mode(n, q, opt));
      continue;
    }
    tasks.clear();
    for (int n = start; n < stop; ++n)
      tasks.push_back(std::async(std::launch::async, [n, &q, &opt] { return solve_mode(n, q, opt); }));
    for (auto& t : tasks) out.push_back(t.get());
  }
  return out;
}

double estimate_constant(const RadialEquilibrium& eq, const NutrientFn& f, double u0_at_1) {
  const ModeCoefficient q = ModeCoefficient::from(eq, f);
  return q.q_max * u0_at_1;
}

EstimateReport verify_estimates(const std::vector<ModeSolution>& modes, double M) {
  EstimateReport rep;
  rep.M = M;
  rep.k_max = static_cast<int>(modes.size()) - 1;
  if (rep.k_max < 2) throw DomainError("verify_estimates needs k_max >= 2");
  constexpr double slack = 1e-12;
  auto note = [&rep](const std::string& what, int k, double lhs, double rhs) {
    std::ostringstream os;
    os << what << " at k = " << k << ": " << lhs << " > " << rhs;
    rep.violations.push_back(os.str());
  };
  for (int k = 0; k <= rep.k_max; ++k) {
    const ModeSolution& m = modes[k];
    const double sharp = M / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
    if (m.du1 > sharp + slack) {
      if (rep.slope_bound) note("u_k'(1) <= M/((2k+1)(2k+3)) violated", k, m.du1, sharp);
      rep.slope_bound = false;
    }
    if (m.u1 > 1.0 + sharp + slack) {
      if (rep.value_bound) note("u_k(1) <= 1 + M/((2k+1)(2k+3)) violated", k, m.u1, 1.0 + sharp);
      rep.value_bound = false;
    }
    const double stated = M / (2.0 * k + 2.0);
    if (m.du1 > stated + slack) {
      if (rep.stated_slope_bound) note("u_k'(1) <= M/(2k+2) violated", k, m.du1, stated);
      rep.stated_slope_bound = false;
    }
    if (k < rep.k_max) {
      const ModeSolution& up = modes[k + 1];
      for (std::size_t j = 0; j < m.profile.size(); ++j)
        if (up.profile[j] > m.profile[j] + slack * m.profile[j]) {
          if (rep.pointwise_monotone) note("u_{k+1} <= u_k violated", k, up.profile[j], m.profile[j]);
          rep.pointwise_monotone = false;
          break;
        }
      rep.gap.push_back(k * (m.du1 - up.du1));
    }
  }
  // The gap sequence must be decreasing over its upper half.
  const int half = rep.k_max / 2;
  for (int k = std::max(half, 1); k + 1 < static_cast<int>(rep.gap.size()); ++k)
    if (!(rep.gap[k + 1] < rep.gap[k])) {
      note("k (u_k'(1) - u_{k+1}'(1)) not decreasing", k + 1, rep.gap[k + 1], rep.gap[k]);
      rep.limit_trend = false;
      break;
    }
  return rep;
}

EstimateReport verify_estimates(int k_max, const RadialEquilibrium& eq, const NutrientFn& f,
                                const ModeOptions& opt) {
  if (k_max < 2) throw DomainError("verify_estimates needs k_max >= 2");
  const std::vector<ModeSolution> modes = solve_modes(k_max, eq, f, opt);
  return verify_estimates(modes, estimate_constant(eq, f, modes.front().u1));
}

}  // namespace tumorbif
