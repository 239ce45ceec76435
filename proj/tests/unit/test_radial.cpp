#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "oracle/bessel_series.hpp"
#include "tumorbif/errors.hpp"
#include "tumorbif/radial.hpp"

using namespace tumorbif;

TEST_CASE("radial shot matches the Bessel profile") {
  const NutrientFn f = NutrientFn::identity();
  for (double c : {0.1, 0.5, 0.9}) {
    const RadialShot s = integrate_radial_ivp(c, f);
    const double R = oracle::radius_from_center(c);
    CHECK(s.R == doctest::Approx(R).epsilon(1e-10));
    CHECK(s.slope == doctest::Approx(c * oracle::bessel_i(1, R)).epsilon(1e-9));
  }
}

TEST_CASE("radial shot rejects c outside (0, 1)") {
  const NutrientFn f = NutrientFn::identity();
  CHECK_THROWS_AS(integrate_radial_ivp(0.0, f), DomainError);
  CHECK_THROWS_AS(integrate_radial_ivp(1.0, f), DomainError);
  CHECK_THROWS_AS(integrate_radial_ivp(-0.2, f), DomainError);
}

TEST_CASE("radius decreases with the center value") {
  for (const NutrientFn& f : {NutrientFn::identity(), NutrientFn::michaelis_menten(3.0)}) {
    double prev = INFINITY;
    for (int i = 1; i < 20; ++i) {
      const double R = integrate_radial_ivp(i / 20.0, f).R;
      CHECK(R < prev);
      prev = R;
    }
  }
}

TEST_CASE("unit equilibrium") {
  const RadialEquilibrium& eq = fixtures::unit_equilibrium();
  const double I0 = oracle::bessel_i(0, 1.0);
  CHECK(eq.R_A == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eq.c_A == doctest::Approx(1.0 / I0).epsilon(1e-10));
  CHECK(eq.residual <= 1e-10);
  for (double s : {0.0, 0.25, 0.6, 1.0}) {
    CHECK(eval_v0(eq, s) == doctest::Approx(oracle::bessel_i(0, s) / I0).epsilon(1e-11));
    CHECK(eq.dv0(s) == doctest::Approx(oracle::bessel_i(1, s) / I0).epsilon(1e-10));
  }
  CHECK(eq.slope_at_boundary() == doctest::Approx(0.5 * eq.A * eq.R_A * eq.R_A).epsilon(1e-10));
  CHECK(radial_pressure(eq, 2.0) == doctest::Approx(1.0 - eq.A * 2.0 / 4.0));
  CHECK_THROWS_AS(eval_v0(eq, 1.01), DomainError);
  CHECK_THROWS_AS(eval_v0(eq, -0.01), DomainError);
}

TEST_CASE("find_RA over a range of A") {
  for (const NutrientFn& f : {NutrientFn::identity(), NutrientFn::michaelis_menten(2.0)}) {
    const double f1 = f.value(1.0);
    double prev = INFINITY;
    for (int i = 0; i < 10; ++i) {
      const double A = f1 * (0.1 + 0.8 * i / 9.0);
      const RadialEquilibrium eq = find_RA(A, f);
      CHECK(eq.residual <= 1e-10);
      CHECK(eq.R_A < prev);
      CHECK(eval_v0(eq, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
      // v0 is increasing and stays in (0, 1]
      CHECK(eval_v0(eq, 0.0) > 0.0);
      CHECK(eval_v0(eq, 0.5) < eval_v0(eq, 0.9));
      if (f.kind() == NutrientFn::Kind::Identity)
        CHECK(oracle::A_for_radius(eq.R_A) == doctest::Approx(A).epsilon(1e-9));
      prev = eq.R_A;
    }
  }
}

TEST_CASE("find_RA rejects A outside (0, f(1))") {
  const NutrientFn f = NutrientFn::identity();
  CHECK_THROWS_AS(find_RA(0.0, f), ParameterError);
  CHECK_THROWS_AS(find_RA(1.0, f), ParameterError);
  CHECK_THROWS_AS(find_RA(1.3, f), ParameterError);
}
