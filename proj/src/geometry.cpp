#include "tumorbif/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tumorbif/errors.hpp"

namespace tumorbif {

using std::numbers::pi;

ShapeCoeffs ShapeCoeffs::zero(int l, int K) {
  ShapeCoeffs r;
  r.l = l;
  r.a.assign(K + 1, 0.0);
  return r;
}

ShapeCoeffs ShapeCoeffs::mode(int l, int k, double eps, int K) {
  if (k > K) throw DomainError("mode index exceeds truncation order");
  ShapeCoeffs r = zero(l, K);
  r.a[k] = eps;
  return r;
}

namespace {

enum class Part { All, Even, Odd };

ShapeValue eval(const ShapeCoeffs& rho, double s, Part part) {
  ShapeValue v;
  for (int m = 0; m <= rho.K(); ++m) {
    const int w = m * rho.l;
    if (part == Part::Even && (w % 2)) continue;
    if (part == Part::Odd && !(w % 2)) continue;
    const double c = std::cos(w * s);
    const double sn = std::sin(w * s);
    v.rho += rho.a[m] * c;
    v.d1 -= rho.a[m] * w * sn;
    v.d2 -= rho.a[m] * w * w * c;
  }
  return v;
}

}  // namespace

ShapeValue eval_shape(const ShapeCoeffs& rho, double s) { return eval(rho, s, Part::All); }
ShapeValue eval_shape_even_part(const ShapeCoeffs& rho, double s) { return eval(rho, s, Part::Even); }
ShapeValue eval_shape_odd_part(const ShapeCoeffs& rho, double s) { return eval(rho, s, Part::Odd); }

double sup_norm(const ShapeCoeffs& rho, int samples) {
  double m = 0.0;
  for (int j = 0; j < samples; ++j) m = std::max(m, std::abs(eval_shape(rho, 2.0 * pi * j / samples).rho));
  return m;
}

void validate_shape(const ShapeCoeffs& rho) {
  if (rho.l < 1) throw DomainError("symmetry order l must be at least 1");
  if (rho.a.empty()) throw DomainError("shape needs at least the coefficient a_0");
  const double m = sup_norm(rho);
  if (!(m < 0.25)) {
    std::ostringstream os;
    os << "sup |rho| = " << m << " leaves the admissible neighbourhood (< 1/4)";
    throw DomainError(os.str());
  }
}

double curvature(const ShapeCoeffs& rho, double R_A, double s) {
  const ShapeValue v = eval_shape(rho, s);
  const double r = R_A * (1.0 + v.rho);
  const double r1 = R_A * v.d1;
  const double r2 = R_A * v.d2;
  const double q = r * r + r1 * r1;
  return (r * r + 2.0 * r1 * r1 - r * r2) / (q * std::sqrt(q));
}

std::array<double, 2> normal_field(const ShapeCoeffs& rho, double s) {
  const ShapeValue v = eval_shape(rho, s);
  return {1.0, -v.d1 / (1.0 + v.rho)};
}

std::array<double, 2> chart(const ShapeCoeffs& rho, double R_A, double sigma, double theta) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw DomainError("chart coordinate sigma must lie in [0, 1]");
  const double r = sigma * R_A * (1.0 + eval_shape(rho, theta).rho);
  return {r * std::cos(theta), r * std::sin(theta)};
}

double parity_chart_radius(const ShapeCoeffs& rho, double R_A, double sigma, double theta) {
  const double e = eval_shape_even_part(rho, theta).rho;
  const double o = eval_shape_odd_part(rho, theta).rho;
  return sigma * R_A * (1.0 + e + sigma * o);
}

BoundaryGrid BoundaryGrid::build(const ShapeCoeffs& rho, int n_theta) {
  const int need = 4 * (rho.K() * rho.l + 1);
  if (n_theta < need) {
    std::ostringstream os;
    os << "angular grid of " << n_theta << " nodes is below the anti-aliasing minimum " << need;
    throw DomainError(os.str());
  }
  BoundaryGrid g;
  g.theta.resize(n_theta);
  g.rho.resize(n_theta);
  g.d1.resize(n_theta);
  g.d2.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    g.theta[j] = 2.0 * pi * j / n_theta;
    const ShapeValue v = eval_shape(rho, g.theta[j]);
    g.rho[j] = v.rho;
    g.d1[j] = v.d1;
    g.d2[j] = v.d2;
  }
  return g;
}

std::vector<std::array<double, 2>> outline(const ShapeCoeffs& rho, double R_A, int n) {
  std::vector<std::array<double, 2>> pts(n);
  for (int j = 0; j < n; ++j) pts[j] = chart(rho, R_A, 1.0, 2.0 * pi * j / n);
  return pts;
}

}  // namespace tumorbif
