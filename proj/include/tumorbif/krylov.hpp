#pragma once

#include <Eigen/Dense>
#include <functional>

namespace tumorbif::krylov {

using Vector = Eigen::VectorXd;
using LinearMap = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;  // preconditioned
  bool converged = false;
};

/// Restarted GMRES with left preconditioning: solves M^{-1} A x = M^{-1} b.
/// Stops once the preconditioned residual 2-norm drops below
/// max(rel_tol * |M^{-1} b|, abs_tol). For a collocation operator whose row
/// scale is large the preconditioned residual tracks the solution error,
/// while the plain residual is floored by rounding.
GmresResult gmres(const LinearMap& A, const LinearMap& M_inv, const Vector& b, double rel_tol,
                  double abs_tol = 0.0, int restart = 60, int max_iterations = 600);

}  // namespace tumorbif::krylov
