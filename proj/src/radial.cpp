#include "tumorbif/radial.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>
#include <utility>

#include "tumorbif/errors.hpp"

namespace tumorbif {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

struct RadialRhs {
  const NutrientFn* f;
  void operator()(const State& y, State& dy, double r) const {
    dy[0] = y[1];
    dy[1] = f->value(std::max(y[0], 0.0)) - y[1] / r;
  }
};

// Three-term expansion at the regular singular point.
State series_start(double c, const NutrientFn& f, double r) {
  const double a = f.value(c) / 4.0;
  const double b = f.derivative(c) * f.value(c) / 64.0;
  return {c + a * r * r + b * r * r * r * r, 2.0 * a * r + 4.0 * b * r * r * r};
}

constexpr double kSeriesRadius = 1e-4;

}  // namespace

RadialShot integrate_radial_ivp(double c, const NutrientFn& f, const RadialOptions& opt) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("center value c must lie in (0, 1)");
  RadialShot shot;
  shot.c = c;
  shot.r.push_back(0.0);
  shot.psi.push_back(c);

  double r = kSeriesRadius;
  State y = series_start(c, f, r);
  if (y[0] >= 1.0) {
    // Hit radius inside the series disc: Newton on the expansion itself.
    double s = std::sqrt(4.0 * (1.0 - c) / f.value(c));
    for (int it = 0; it < 50; ++it) {
      const State z = series_start(c, f, s);
      const double ds = (z[0] - 1.0) / z[1];
      s -= ds;
      if (std::abs(ds) <= 1e-16 * s) break;
    }
    const State z = series_start(c, f, s);
    shot.R = s;
    shot.slope = z[1];
    shot.r.push_back(s);
    shot.psi.push_back(1.0);
    return shot;
  }

  RadialRhs rhs{&f};
  auto stepper = odeint::make_controlled(opt.ode_tol, opt.ode_tol,
                                         odeint::runge_kutta_fehlberg78<State>());
  odeint::runge_kutta_fehlberg78<State> plain;
  double dt = 1e-3;
  shot.r.push_back(r);
  shot.psi.push_back(y[0]);
  while (r < opt.r_max) {
    const State y_prev = y;
    const double r_prev = r;
    if (stepper.try_step(rhs, y, r, dt) != odeint::success) continue;
    if (y[0] < 1.0) {
      shot.r.push_back(r);
      shot.psi.push_back(y[0]);
      continue;
    }
    // Crossing inside the last step: Newton on the step length.
    double h = (r - r_prev) * (1.0 - y_prev[0]) / (y[0] - y_prev[0]);
    State z{};
    for (int it = 0; it < 60; ++it) {
      plain.do_step(rhs, y_prev, r_prev, z, h);
      const double dh = (z[0] - 1.0) / z[1];
      h -= dh;
      if (std::abs(dh) <= 1e-16 * (r_prev + h)) break;
    }
    plain.do_step(rhs, y_prev, r_prev, z, h);
    shot.R = r_prev + h;
    shot.slope = z[1];
    shot.r.push_back(shot.R);
    shot.psi.push_back(1.0);
    return shot;
  }
  std::ostringstream os;
  os << "radial profile from c = " << c << " did not reach 1 before r_max = " << opt.r_max;
  throw SolverError(os.str());
}

RadialEquilibrium find_RA(double A, const NutrientFn& f, const RadialOptions& opt) {
  ModelParams p;
  p.A = A;
  p.f = f;
  validate_params(p);

  // g(c) = 2 psi'(R(c)) / R(c) - A increases from -A (c -> 0) to f(1) - A (c -> 1).
  std::vector<std::pair<double, double>> visited;  // (c, R(c))
  auto g = [&](double c) {
    const RadialShot s = integrate_radial_ivp(c, f, opt);
    visited.emplace_back(c, s.R);
    return 2.0 * s.slope / s.R - A;
  };

  double lo = 0.5;
  double hi = 0.5;
  while (g(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < 1e-14) throw SolverError("no sign change of the radial map near c = 0");
  }
  while (g(hi) <= 0.0) {
    hi = 0.5 * (hi + 1.0);
    if (1.0 - hi < 1e-14) throw SolverError("no sign change of the radial map near c = 1");
  }
  // Stop on a tight bracket, or once the residual is two decades below the
  // acceptance level (the map can be steep for small c).
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm < 0.0) lo = mid; else hi = mid;
    if (hi - lo <= opt.bisection_tol && std::abs(gm) <= 1e-2 * opt.residual_tol) break;
  }
  const double c = 0.5 * (lo + hi);

  // The bisection relies on R(c) being decreasing; check it on every shot taken.
  std::sort(visited.begin(), visited.end());
  for (std::size_t i = 1; i < visited.size(); ++i)
    if (visited[i].first > visited[i - 1].first && !(visited[i].second < visited[i - 1].second))
      throw SolverError("radial shooting map is not monotone in c");

  const RadialShot shot = integrate_radial_ivp(c, f, opt);
  RadialEquilibrium eq;
  eq.A = A;
  eq.R_A = shot.R;
  eq.c_A = c;
  eq.residual = std::abs(2.0 * shot.slope / shot.R - A);
  if (eq.residual > opt.residual_tol) {
    std::ostringstream os;
    os << "radial equilibrium residual " << eq.residual << " exceeds " << opt.residual_tol;
    throw SolverError(os.str());
  }

  // Sample v0(s) = psi(s R_A) on a Chebyshev grid over [0, 1].
  const std::vector<double> s = spectral::ChebyshevInterpolant::nodes(opt.grid_size, 0.0, 1.0);
  std::vector<double> times;
  times.push_back(kSeriesRadius);
  for (std::size_t j = 1; j + 1 < s.size(); ++j)
    if (s[j] * eq.R_A > kSeriesRadius) times.push_back(s[j] * eq.R_A);
  times.push_back(eq.R_A);

  std::vector<double> values(s.size());
  std::vector<double> slopes(s.size());
  values.front() = c;
  values.back() = 1.0;
  slopes.front() = 0.0;
  slopes.back() = eq.R_A * shot.slope;
  std::vector<std::pair<double, State>> observed;
  observed.reserve(times.size());
  State y = series_start(c, f, kSeriesRadius);
  RadialRhs rhs{&f};
  auto stepper = odeint::make_controlled(opt.ode_tol, opt.ode_tol,
                                         odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3,
                          [&](const State& x, double r) { observed.emplace_back(r, x); });
  std::size_t next = 0;
  for (std::size_t j = 1; j + 1 < s.size(); ++j) {
    const double r = s[j] * eq.R_A;
    if (r <= kSeriesRadius) {
      const State y0 = series_start(c, f, r);
      values[j] = y0[0];
      slopes[j] = eq.R_A * y0[1];
      continue;
    }
    while (next < observed.size() && observed[next].first < r) ++next;
    values[j] = observed.at(next).second[0];
    slopes[j] = eq.R_A * observed.at(next).second[1];
  }
  eq.v0 = spectral::ChebyshevInterpolant(0.0, 1.0, std::move(values));
  eq.dv0 = spectral::ChebyshevInterpolant(0.0, 1.0, std::move(slopes));
  return eq;
}

double eval_v0(const RadialEquilibrium& eq, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("v0 is defined on [0, 1]");
  return eq.v0(r);
}

double radial_pressure(const RadialEquilibrium& eq, double G) {
  return 1.0 / eq.R_A - eq.A * G * eq.R_A * eq.R_A / 4.0;
}

}  // namespace tumorbif
