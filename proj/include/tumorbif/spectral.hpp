#pragma once

// Small toolbox of spectral discretization primitives shared by the radial,
// mode and field solvers.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace tumorbif::spectral {

/// Chebyshev-Gauss-Lobatto points cos(pi*j/(n-1)), j = 0..n-1 (descending).
Eigen::VectorXd chebyshev_points(int n);

/// Differentiation matrix on chebyshev_points(n).
Eigen::MatrixXd chebyshev_diff(int n);

/// Fourier differentiation matrices on the uniform grid theta_j = 2*pi*j/n,
/// n even.
Eigen::MatrixXd fourier_diff1(int n);
Eigen::MatrixXd fourier_diff2(int n);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [a, b].
Quadrature gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Barycentric interpolant through Chebyshev-Gauss-Lobatto samples mapped to
/// [a, b]. Exact at the nodes.
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;
  ChebyshevInterpolant(double a, double b, std::vector<double> values);

  /// Nodes of an n-point grid on [a, b], ascending.
  static std::vector<double> nodes(int n, double a, double b);

  double operator()(double x) const;
  double derivative(double x) const;

  double lower() const { return a_; }
  double upper() const { return b_; }
  std::span<const double> grid() const { return x_; }
  std::span<const double> values() const { return y_; }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> dy_;  // derivative samples
  std::vector<double> w_;   // barycentric weights

  double interpolate(std::span<const double> samples, double x) const;
};

}  // namespace tumorbif::spectral
