#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tumorbif/model.hpp"
#include "tumorbif/radial.hpp"

namespace tumorbif {

/// Solution of u'' + (2n+1)/r u' = R_A^2 f'(v0) u, u(0) = 1, u'(0) = 0 on [0, 1].
struct ModeSolution {
  int n = 0;
  double u1 = 1.0;   // u_n(1)
  double du1 = 0.0;  // u_n'(1)
  std::vector<double> r;        // uniform sample grid on [0, 1]
  std::vector<double> profile;  // u_n on r

  double ratio() const { return du1 / u1; }
};

/// Coefficient R_A^2 f'(v0(r)) of the mode equation as a function of r in
/// [0, 1]. Built from an equilibrium; tests may substitute their own.
struct ModeCoefficient {
  std::function<double(double)> q;
  double q0 = 0.0;  // q(0)
  double q_max = 0.0;  // max over [0,1]

  static ModeCoefficient from(const RadialEquilibrium& eq, const NutrientFn& f);
  static ModeCoefficient constant(double value);
};

struct ModeOptions {
  int grid_size = 201;
  double ode_tol = 1e-14;
};

ModeSolution solve_mode(int n, const ModeCoefficient& q, const ModeOptions& opt = {});
ModeSolution solve_mode(int n, const RadialEquilibrium& eq, const NutrientFn& f,
                        const ModeOptions& opt = {});

/// u_n'(1) / u_n(1).
double mode_ratio(int n, const RadialEquilibrium& eq, const NutrientFn& f,
                  const ModeOptions& opt = {});

struct VolterraOptions {
  int nodes = 48;          // Chebyshev nodes carrying u
  int max_iterations = 200;
  double tol = 1e-15;      // sup-norm change between Picard iterates
  int grid_size = 201;
};

/// Picard iteration on the integral form
///   u(r) = 1 + int_0^r R_A^2 s^-(2n+1) int_0^s t^(2n+1) f'(v0(t)) u(t) dt ds.
ModeSolution solve_mode_volterra(int n, const ModeCoefficient& q, const VolterraOptions& opt = {});
ModeSolution solve_mode_volterra(int n, const RadialEquilibrium& eq, const NutrientFn& f,
                                 const VolterraOptions& opt = {});

/// Solves modes 0..k_max, one task per mode.
std::vector<ModeSolution> solve_modes(int k_max, const RadialEquilibrium& eq, const NutrientFn& f,
                                      const ModeOptions& opt = {});

struct EstimateReport {
  double M = 0.0;  // R_A^2 u_0(1) max f'(v0)
  int k_max = 0;
  bool pointwise_monotone = true;     // u_{k+1} <= u_k on the grid
  bool slope_bound = true;            // u_k'(1) <= M / ((2k+1)(2k+3))
  bool value_bound = true;            // u_k(1) <= 1 + M / ((2k+1)(2k+3))
  bool stated_slope_bound = true;     // u_k'(1) <= M / (2k+2)
  bool limit_trend = true;            // k (u_k'(1) - u_{k+1}'(1)) decays to 0
  std::vector<double> gap;            // k (u_k'(1) - u_{k+1}'(1)), k = 0..k_max-1
  std::vector<std::string> violations;

  bool ok() const { return pointwise_monotone && slope_bound && value_bound && limit_trend; }
};

/// Checks the a-priori bounds on the mode family for 0 <= k <= k_max.
EstimateReport verify_estimates(int k_max, const RadialEquilibrium& eq, const NutrientFn& f,
                                const ModeOptions& opt = {});
EstimateReport verify_estimates(const std::vector<ModeSolution>& modes, double M);

/// M = R_A^2 u_0(1) max_{[0,1]} f'(v0).
double estimate_constant(const RadialEquilibrium& eq, const NutrientFn& f, double u0_at_1);

}  // namespace tumorbif
