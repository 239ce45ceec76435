#pragma once

#include <array>
#include <vector>

namespace tumorbif {

/// Even, 2*pi/l-periodic boundary perturbation rho(s) = sum_m a_m cos(m l s).
struct ShapeCoeffs {
  int l = 1;
  std::vector<double> a;  // a_0 .. a_K

  int K() const { return static_cast<int>(a.size()) - 1; }

  static ShapeCoeffs zero(int l, int K);
  /// eps * cos(k l s) with K >= k.
  static ShapeCoeffs mode(int l, int k, double eps, int K);
};

struct ShapeValue {
  double rho = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

ShapeValue eval_shape(const ShapeCoeffs& rho, double s);

/// Max |rho| on a dense grid.
double sup_norm(const ShapeCoeffs& rho, int samples = 2048);

/// Throws DomainError unless sup |rho| < 1/4 and l >= 1.
void validate_shape(const ShapeCoeffs& rho);

/// Split rho = even + odd under s -> s + pi.
ShapeValue eval_shape_even_part(const ShapeCoeffs& rho, double s);
ShapeValue eval_shape_odd_part(const ShapeCoeffs& rho, double s);

/// Curvature of the polar curve r(s) = R_A (1 + rho(s)); 1/R for a circle.
double curvature(const ShapeCoeffs& rho, double R_A, double s);

/// grad N_rho at the boundary point over angle s, in the polar frame
/// (e_r, e_theta): (1, -rho'/(1 + rho)).
std::array<double, 2> normal_field(const ShapeCoeffs& rho, double s);

/// Point with polar radius sigma R_A (1 + rho(theta)), sigma in [0, 1].
std::array<double, 2> chart(const ShapeCoeffs& rho, double R_A, double sigma, double theta);

/// Parity-compatible variant used by the field solver:
/// radius sigma R_A (1 + rho_even(theta) + sigma rho_odd(theta)). It coincides
/// with chart() when rho has no odd harmonics and always at sigma = 1, and
/// it satisfies s(-sigma, theta) = -s(sigma, theta + pi).
double parity_chart_radius(const ShapeCoeffs& rho, double R_A, double sigma, double theta);

/// Uniform angular nodes carrying rho and its derivatives.
struct BoundaryGrid {
  std::vector<double> theta;
  std::vector<double> rho;
  std::vector<double> d1;
  std::vector<double> d2;

  static BoundaryGrid build(const ShapeCoeffs& rho, int n_theta);
};

/// Boundary outline (x, y) of Omega_rho at n uniformly spaced angles.
std::vector<std::array<double, 2>> outline(const ShapeCoeffs& rho, double R_A, int n);

}  // namespace tumorbif
