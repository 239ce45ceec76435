#pragma once

#include <vector>

#include "tumorbif/model.hpp"
#include "tumorbif/spectral.hpp"

namespace tumorbif {

/// Radially symmetric equilibrium: the disc of radius R_A carrying the
/// nutrient profile psi(r) = v0(r / R_A).
struct RadialEquilibrium {
  double A = 0.0;
  double R_A = 0.0;
  double c_A = 0.0;  // v0(0)
  double residual = 0.0;  // |2 psi'(R_A)/R_A - A|
  spectral::ChebyshevInterpolant v0;   // on [0, 1]
  spectral::ChebyshevInterpolant dv0;  // d v0 / ds sampled from the integrator, not differentiated

  /// d v0 / ds at s = 1, i.e. R_A psi'(R_A).
  double slope_at_boundary() const { return dv0(1.0); }
};

/// Radial shot psi'' + psi'/r = f(psi), psi(0) = c, psi'(0) = 0, stopped
/// where psi first reaches 1.
struct RadialShot {
  double c = 0.0;
  double R = 0.0;
  double slope = 0.0;  // psi'(R)
  std::vector<double> r;  // accepted integrator steps
  std::vector<double> psi;
};

struct RadialOptions {
  double r_max = 60.0;
  double ode_tol = 1e-14;
  double bisection_tol = 1e-12;
  double residual_tol = 1e-10;
  int grid_size = 256;
};

RadialShot integrate_radial_ivp(double c, const NutrientFn& f, const RadialOptions& opt = {});

RadialEquilibrium find_RA(double A, const NutrientFn& f, const RadialOptions& opt = {});

double eval_v0(const RadialEquilibrium& eq, double r);

/// Uniform pressure of the radial state, 1/R_A - A G R_A^2 / 4.
double radial_pressure(const RadialEquilibrium& eq, double G);

}  // namespace tumorbif
