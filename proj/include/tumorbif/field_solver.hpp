#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "tumorbif/geometry.hpp"
#include "tumorbif/model.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"

namespace tumorbif {

struct FieldGridSize {
  int n_r = 48;       // chart radial nodes in (0, 1]
  int n_theta = 128;  // uniform angular nodes (even)
};

/// Smallest grid with n_theta >= grid.n_theta and n_theta divisible by 2l.
/// On such grids the aliases of cos(m l s) harmonics stay in that family.
FieldGridSize symmetric_grid(FieldGridSize grid, int l);

struct FieldOptions {
  FieldGridSize grid;
  double newton_tol = 1e-10;  // scaled discrete residual
  int newton_max_iterations = 50;
  double linear_tol = 1e-13;
};

/// Fields on the tensor grid (sigma_i, theta_j) of the parity chart. Row 0
/// is the boundary sigma = 1; sigma decreases with the row index.
struct FieldSolution {
  std::vector<double> sigma;
  std::vector<double> theta;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd p;
  ShapeCoeffs rho;
  double psi_residual = 0.0;  // scaled residual of the nutrient problem
  double p_residual = 0.0;    // relative residual of the pressure solve
  int newton_iterations = 0;
  std::vector<double> newton_history;
  Eigen::MatrixXd psi_correction;  // psi minus v0 composed with the chart
  double base_slope = 0.0;         // sigma-derivative of that base at sigma = 1
  bool max_principle = true;  // max psi <= 1
};

/// Boundary trace of Phi(G, rho) on the angular nodes with its real Fourier
/// coefficients: values = sum_m cos_coeffs[m] cos(m s) + sin_coeffs[m] sin(m s).
struct PhiTrace {
  std::vector<double> theta;
  std::vector<double> values;
  std::vector<double> cos_coeffs;  // m = 0 .. n_theta/2
  std::vector<double> sin_coeffs;  // m = 0 .. n_theta/2

  static PhiTrace from_values(std::vector<double> theta, std::vector<double> values);

  double sup_norm() const;
  /// Coefficients of cos(m l s), m = 0, 1, ... while m l <= n_theta/2.
  std::vector<double> family(int l) const;
  /// Largest coefficient outside the cos(m l s) family relative to the
  /// largest coefficient overall (0 for a vanishing trace).
  double leakage(int l) const;
};

/// Collocation discretization of the Laplacian on Omega_rho in chart
/// coordinates. Exposed for tests and the solvers below.
class ChartLaplacian {
 public:
  ChartLaplacian(const ShapeCoeffs& rho, double R_A, FieldGridSize grid);

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<double>& theta() const { return theta_; }
  /// Polar radius of node (i, j).
  double radius(int i, int j) const { return s_(i, j); }

  /// Laplacian at every node (the boundary row is evaluated too).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& U) const;
  /// Laplacian of a function of sigma alone given its exact first and second
  /// sigma-derivatives at the radial nodes.
  Eigen::MatrixXd apply_radial(const Eigen::VectorXd& u_sigma, const Eigen::VectorXd& u_sigma2) const;
  /// Partial derivatives of U with respect to the chart variables.
  Eigen::MatrixXd d_sigma(const Eigen::MatrixXd& U) const;
  Eigen::MatrixXd d_theta(const Eigen::MatrixXd& U) const;
  /// Row-wise operator scale used to normalize residuals.
  const Eigen::MatrixXd& row_scale() const { return scale_; }

  /// Polar derivatives (d/dr, d/dtheta at fixed r) on the boundary row.
  void boundary_gradient(const Eigen::MatrixXd& U, std::vector<double>& d_r,
                         std::vector<double>& d_theta_polar) const;
  /// Adds the polar derivatives of a function of sigma alone whose
  /// sigma-derivative at the boundary is u_sigma.
  void add_radial_boundary_gradient(double u_sigma, std::vector<double>& d_r,
                                    std::vector<double>& d_theta_polar) const;

  /// Applies the inverse of the rotationally averaged operator
  ///   (1/Rm^2)(d_ss + d_s/s + d_tt/s^2) - c(s)
  /// with Dirichlet rows on the boundary.
  class Preconditioner;
  std::unique_ptr<Preconditioner> preconditioner(const std::vector<double>& reaction) const;

 private:
  int n_r_;
  int n_theta_;
  double mean_radius_;
  std::vector<double> sigma_;
  std::vector<double> theta_;
  Eigen::MatrixXd Dp_, Dm_, D2p_, D2m_;  // folded radial operators
  Eigen::MatrixXd Dt_, D2t_;             // Fourier operators
  Eigen::MatrixXd s_, c_ss_, c_st_, c_tt_, c_s_, s_sig_, beta_;
  Eigen::MatrixXd scale_;
  Eigen::MatrixXd basis_pinv_;  // values -> real Fourier coefficients (column form)
  Eigen::MatrixXd basis_;

  Eigen::MatrixXd fold(const Eigen::MatrixXd& plus, const Eigen::MatrixXd& minus,
                       const Eigen::MatrixXd& U) const;

  friend class Preconditioner;
};

class ChartLaplacian::Preconditioner {
 public:
  Preconditioner(const ChartLaplacian& lap, const std::vector<double>& reaction);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& R) const;

 private:
  const ChartLaplacian* lap_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;  // per wavenumber
};

/// Solves Delta psi = f(psi) in Omega_rho, psi = 1 on the boundary, by Newton
/// iteration started from v0 composed with the chart.
FieldSolution solve_nutrient(const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                             const NutrientFn& f, const FieldOptions& opt = {});

/// Solves Delta p = 0, p = kappa - A G |x|^2 / 4 on the boundary. Fills
/// sol.p and sol.p_residual; sol must come from solve_nutrient on the same rho.
void solve_pressure(FieldSolution& sol, const RadialEquilibrium& eq, double G,
                    const FieldOptions& opt = {});

/// Both fields.
FieldSolution solve_fields(double G, const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                           const NutrientFn& f, const FieldOptions& opt = {});

/// Phi(G, rho) = <G grad psi - grad p - A G x / 2, grad N_rho> on the boundary.
PhiTrace assemble_phi(double G, const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                      const NutrientFn& f, const FieldOptions& opt = {});
PhiTrace phi_from_fields(double G, const FieldSolution& sol, const RadialEquilibrium& eq,
                         const FieldOptions& opt = {});

/// Phi(G, rho) = offset + G * slope for fixed rho: psi does not depend on G
/// and p depends on it affinely.
struct PhiAffine {
  PhiTrace offset;
  PhiTrace slope;

  PhiTrace at(double G) const;
};

/// One nutrient solve and two harmonic solves.
PhiAffine assemble_phi_affine(const ShapeCoeffs& rho, const RadialEquilibrium& eq,
                              const NutrientFn& f, const FieldOptions& opt = {});

struct MultiplierCheck {
  double measured = 0.0;   // projection of the linearization onto cos(k s), per unit R_A
  double reference = 0.0;  // mu_k(G) from the symbol
  double relative_error = 0.0;
  double leakage = 0.0;    // largest off-mode coefficient of the difference quotient
  bool passed = false;
};

/// Central-difference linearization of Phi at rho = 0 in direction cos(k s)
/// compared with mu_k(G) from the symbol table. The relative error falls back
/// to the absolute error when mu_k(G) vanishes.
MultiplierCheck multiplier_check(double G, int k, double eps, const SymbolTable& table,
                                 const RadialEquilibrium& eq, const NutrientFn& f,
                                 const FieldOptions& opt = {}, double bound = 1e-3);

}  // namespace tumorbif
