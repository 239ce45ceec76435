#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "tumorbif/errors.hpp"
#include "tumorbif/geometry.hpp"

using namespace tumorbif;

namespace {

constexpr double kPi = std::numbers::pi;

ShapeCoeffs random_shape(std::mt19937_64& rng, int l, int K, double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ShapeCoeffs rho = ShapeCoeffs::zero(l, K);
  double total = 0.0;
  for (double& a : rho.a) {
    a = u(rng);
    total += std::abs(a);
  }
  for (double& a : rho.a) a *= amplitude / total;
  return rho;
}

// Signed curvature of the closed curve s -> chart point, from finite
// differences of the Cartesian coordinates.
double fd_curvature(const ShapeCoeffs& rho, double R, double s) {
  const double h = 1e-4;
  auto pt = [&](double t) { return chart(rho, R, 1.0, t); };
  const auto m = pt(s - h), c = pt(s), p = pt(s + h);
  const double x1 = (p[0] - m[0]) / (2 * h), y1 = (p[1] - m[1]) / (2 * h);
  const double x2 = (p[0] - 2 * c[0] + m[0]) / (h * h), y2 = (p[1] - 2 * c[1] + m[1]) / (h * h);
  return (x1 * y2 - y1 * x2) / std::pow(x1 * x1 + y1 * y1, 1.5);
}

}  // namespace

TEST_CASE("shape evaluation and derivatives") {
  const ShapeCoeffs rho{3, {0.01, -0.02, 0.005}};
  const double s = 0.37;
  const ShapeValue v = eval_shape(rho, s);
  CHECK(v.rho == doctest::Approx(0.01 - 0.02 * std::cos(3 * s) + 0.005 * std::cos(6 * s)));
  const double h = 1e-5;
  CHECK(v.d1 == doctest::Approx((eval_shape(rho, s + h).rho - eval_shape(rho, s - h).rho) / (2 * h)).epsilon(1e-8));
  CHECK(v.d2 == doctest::Approx((eval_shape(rho, s + h).d1 - eval_shape(rho, s - h).d1) / (2 * h)).epsilon(1e-8));
  // even and 2 pi / l periodic
  CHECK(eval_shape(rho, -s).rho == doctest::Approx(v.rho));
  CHECK(eval_shape(rho, s + 2 * kPi / 3).rho == doctest::Approx(v.rho));
}

TEST_CASE("mode constructor and sup norm") {
  const ShapeCoeffs m = ShapeCoeffs::mode(2, 3, 0.04, 5);
  CHECK(m.K() == 5);
  CHECK(m.a[3] == 0.04);
  CHECK(sup_norm(m) == doctest::Approx(0.04));
  CHECK(sup_norm(ShapeCoeffs::zero(4, 2)) == 0.0);
  CHECK_THROWS_AS(ShapeCoeffs::mode(2, 6, 0.01, 5), DomainError);
}

TEST_CASE("shape validation") {
  CHECK_NOTHROW(validate_shape(ShapeCoeffs::mode(2, 1, 0.2, 2)));
  CHECK_THROWS_AS(validate_shape(ShapeCoeffs::mode(2, 1, 0.25, 2)), DomainError);
  CHECK_THROWS_AS(validate_shape(ShapeCoeffs{0, {0.0}}), DomainError);
  CHECK_THROWS_AS(validate_shape(ShapeCoeffs{2, {}}), DomainError);
}

TEST_CASE("circle curvature") {
  for (double R : {0.5, 1.0, 3.3}) CHECK(curvature(ShapeCoeffs::zero(2, 3), R, 1.1) == doctest::Approx(1.0 / R));
}

TEST_CASE("curvature against finite differences on random shapes") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ShapeCoeffs rho = random_shape(rng, 1 + t % 4, 4, 0.15);
    const double R = 0.5 + 0.03 * t;
    const double s = angle(rng);
    const double exact = curvature(rho, R, s);
    worst = std::max(worst, std::abs(exact - fd_curvature(rho, R, s)) / std::max(1.0, std::abs(exact)));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("normal field is orthogonal to the tangent") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const ShapeCoeffs rho = random_shape(rng, 2, 5, 0.2);
    for (int j = 0; j < 32; ++j) {
      const double s = 2 * kPi * j / 32;
      const ShapeValue v = eval_shape(rho, s);
      const auto n = normal_field(rho, s);
      CHECK(n[0] == 1.0);
      CHECK(std::abs(n[0] * v.d1 + n[1] * (1.0 + v.rho)) < 1e-14);
    }
  }
}

TEST_CASE("chart and outline") {
  const ShapeCoeffs rho = ShapeCoeffs::mode(2, 1, 0.1, 2);
  const auto p = chart(rho, 2.0, 1.0, 0.0);
  CHECK(p[0] == doctest::Approx(2.2));
  CHECK(p[1] == doctest::Approx(0.0));
  const auto o = chart(rho, 2.0, 0.0, 0.4);
  CHECK(o[0] == 0.0);
  CHECK(o[1] == 0.0);
  CHECK_THROWS_AS(chart(rho, 1.0, 1.5, 0.0), DomainError);
  CHECK_THROWS_AS(chart(rho, 1.0, -0.1, 0.0), DomainError);

  const auto circle = outline(ShapeCoeffs::zero(2, 1), 1.7, 64);
  REQUIRE(circle.size() == 64);
  for (const auto& q : circle) CHECK(std::hypot(q[0], q[1]) == doctest::Approx(1.7));
}

TEST_CASE("even and odd parts") {
  const ShapeCoeffs rho{1, {0.01, 0.02, -0.03, 0.015}};
  for (double s : {0.1, 1.3, 2.9}) {
    const ShapeValue e = eval_shape_even_part(rho, s), o = eval_shape_odd_part(rho, s);
    CHECK(e.rho + o.rho == doctest::Approx(eval_shape(rho, s).rho));
    CHECK(e.rho == doctest::Approx(eval_shape_even_part(rho, s + kPi).rho));
    CHECK(o.rho == doctest::Approx(-eval_shape_odd_part(rho, s + kPi).rho));
    // parity chart agrees with the polar chart on the boundary
    CHECK(parity_chart_radius(rho, 1.4, 1.0, s) == doctest::Approx(1.4 * (1.0 + eval_shape(rho, s).rho)));
    CHECK(parity_chart_radius(rho, 1.4, -0.6, s) == doctest::Approx(-parity_chart_radius(rho, 1.4, 0.6, s + kPi)));
  }
}

TEST_CASE("boundary grid") {
  const ShapeCoeffs rho = ShapeCoeffs::mode(2, 2, 0.05, 3);
  const BoundaryGrid g = BoundaryGrid::build(rho, 32);
  REQUIRE(g.theta.size() == 32);
  CHECK(g.rho[0] == doctest::Approx(0.05));
  CHECK(g.d2[0] == doctest::Approx(-0.05 * 16));
  CHECK_THROWS_AS(BoundaryGrid::build(rho, 16), DomainError);
}
