#include "tumorbif/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tumorbif::spectral {

using std::numbers::pi;

Eigen::VectorXd chebyshev_points(int n) {
  Eigen::VectorXd x(n);
  if (n == 1) {
    x(0) = 1.0;
    return x;
  }
  for (int j = 0; j < n; ++j) x(j) = std::sin(pi * (n - 1 - 2 * j) / (2.0 * (n - 1)));
  return x;
}

Eigen::MatrixXd chebyshev_diff(int n) {
  const int N = n - 1;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  if (N == 0) return D;
  const Eigen::VectorXd x = chebyshev_points(n);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = ((i == 0 || i == N) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        // x_i - x_j in product form avoids cancellation near the endpoints.
        const double dx = 2.0 * std::sin(0.5 * (i + j) * pi / N) * std::sin(0.5 * (j - i) * pi / N);
        D(i, j) = (c(i) / c(j)) / dx;
      }
  // Negative sum trick keeps rows annihilating constants.
  for (int i = 0; i < n; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

Eigen::MatrixXd fourier_diff1(int n) {
  if (n % 2) throw std::invalid_argument("fourier_diff1: n must be even");
  const double h = 2.0 * pi / n;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = i - j;
      if (k == 0) continue;
      D(i, j) = 0.5 * ((k % 2) ? -1.0 : 1.0) / std::tan(0.5 * k * h);
    }
  return D;
}

Eigen::MatrixXd fourier_diff2(int n) {
  if (n % 2) throw std::invalid_argument("fourier_diff2: n must be even");
  const double h = 2.0 * pi / n;
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = i - j;
      if (k == 0) {
        D(i, j) = -pi * pi / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin(0.5 * k * h);
        D(i, j) = -0.5 * ((k % 2) ? -1.0 : 1.0) / (s * s);
      }
    }
  return D;
}

Quadrature gauss_legendre(int n, double a, double b) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[n - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    q.weights[n - 1 - i] = 0.5 * (b - a) * w;
  }
  return q;
}

std::vector<double> ChebyshevInterpolant::nodes(int n, double a, double b) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = a + (b - a) * 0.5 * (1.0 - std::cos(pi * j / (n - 1)));
  x.front() = a;
  x.back() = b;
  return x;
}

ChebyshevInterpolant::ChebyshevInterpolant(double a, double b, std::vector<double> values)
    : a_(a), b_(b), y_(std::move(values)) {
  const int n = static_cast<int>(y_.size());
  if (n < 2) throw std::invalid_argument("ChebyshevInterpolant needs at least two samples");
  x_ = nodes(n, a, b);
  w_.resize(n);
  for (int j = 0; j < n; ++j) w_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);

  // Derivative samples via the differentiation matrix (descending points on
  // [-1,1] map to our ascending points through x -> -x).
  const Eigen::MatrixXd D = chebyshev_diff(n);
  Eigen::VectorXd y(n);
  for (int j = 0; j < n; ++j) y(j) = y_[n - 1 - j];
  const Eigen::VectorXd dy = D * y * (2.0 / (b - a));
  dy_.resize(n);
  for (int j = 0; j < n; ++j) dy_[j] = dy(n - 1 - j);
}

double ChebyshevInterpolant::interpolate(std::span<const double> samples, double x) const {
  double num = 0.0;
  double den = 0.0;
  const int n = static_cast<int>(x_.size());
  for (int j = 0; j < n; ++j) {
    const double d = x - x_[j];
    if (d == 0.0) return samples[j];
    const double t = w_[j] / d;
    num += t * samples[j];
    den += t;
  }
  return num / den;
}

double ChebyshevInterpolant::operator()(double x) const { return interpolate(y_, x); }

double ChebyshevInterpolant::derivative(double x) const { return interpolate(dy_, x); }

}  // namespace tumorbif::spectral
