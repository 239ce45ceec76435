#include "tumorbif/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tumorbif::krylov {

GmresResult gmres(const LinearMap& A, const LinearMap& M_inv, const Vector& b, double rel_tol,
                  double abs_tol, int restart, int max_iterations) {
  GmresResult res;
  const Eigen::Index n = b.size();
  res.x = Vector::Zero(n);
  auto op = [&](const Vector& v) { return M_inv(A(v)); };
  const Vector pb = M_inv(b);
  const double bnorm = pb.norm();
  const double target = std::max(rel_tol * bnorm, abs_tol);
  if (bnorm <= target) {
    res.converged = true;
    return res;
  }
  Vector r = pb;
  double beta = bnorm;
  while (res.iterations < max_iterations) {
    std::vector<Vector> V;
    V.reserve(restart + 1);
    V.push_back(r / beta);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
    Vector cs = Vector::Zero(restart);
    Vector sn = Vector::Zero(restart);
    Vector g = Vector::Zero(restart + 1);
    g(0) = beta;
    int j = 0;
    for (; j < restart && res.iterations < max_iterations; ++j, ++res.iterations) {
      Vector w = op(V[j]);
      // Modified Gram-Schmidt, twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const double h = V[i].dot(w);
          H(i, j) += h;
          w -= h * V[i];
        }
      H(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = H(j, j) / denom;
      sn(j) = H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      const double hnext = w.norm();
      if (hnext > 0.0) V.push_back(w / hnext);
      if (std::abs(g(j + 1)) <= target || hnext == 0.0) {
        ++j;
        ++res.iterations;
        break;
      }
    }
    // Solve the triangular system and update.
    const Vector y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    Vector z = Vector::Zero(n);
    for (int i = 0; i < j; ++i) z += y(i) * V[i];
    res.x += z;
    r = pb - op(res.x);
    beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (beta <= target) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace tumorbif::krylov
