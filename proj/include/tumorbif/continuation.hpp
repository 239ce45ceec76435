#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tumorbif/field_solver.hpp"
#include "tumorbif/geometry.hpp"
#include "tumorbif/model.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"

namespace tumorbif {

struct ContinuationOptions {
  FieldOptions field;
  int K = 0;                  // shape truncation; 0 picks the largest value allowed by the grid (capped at 12)
  double tol = 1e-8;          // sup |Phi| on the boundary nodes
  int max_iterations = 12;
  double fd_step = 1e-6;      // forward-difference step in the shape coefficients
  double singular_rcond = 1e-10;
};

/// Truncation order used for symmetry l under the given options.
int shape_order(int l, const ContinuationOptions& opt);

struct BranchPoint {
  double eps = 0.0;
  double G = 0.0;
  ShapeCoeffs rho;
  double residual = 0.0;
  int iterations = 0;
};

struct Branch {
  int l = 1;
  int k = 1;
  double G_kl = 0.0;
  std::vector<BranchPoint> points;
  std::vector<std::string> warnings;
};

/// Corrects (G0, rho0) onto Phi = 0 with the amplitude of cos(k l s) pinned
/// to eps. Unknowns: G and the remaining coefficients; equations: the
/// cos(m l s) coefficients of Phi for m = 0..K.
BranchPoint newton_correct(double G0, const ShapeCoeffs& rho0, int k, double eps,
                           const RadialEquilibrium& eq, const NutrientFn& f,
                           const ContinuationOptions& opt = {});

/// Amplitude continuation from (G_kl, 0) in n_steps equal steps to eps_max
/// (negative eps_max traces the other half of the branch). A corrector
/// failure truncates the branch and records a warning.
Branch trace_branch(const BifurcationPoint& point, double eps_max, int n_steps,
                    const RadialEquilibrium& eq, const NutrientFn& f,
                    const ContinuationOptions& opt = {});

struct AsymptoticFit {
  double intercept = 0.0;
  double slope_bound = 0.0;  // |slope|
  double quadratic_defect = 0.0;
};

/// Least-squares line through G(eps) over the nontrivial points and the
/// largest ||rho - eps cos(k l s)||_inf / eps^2.
AsymptoticFit fit_asymptotics(const Branch& branch);

/// Largest |Phi| of each branch point recomputed on symmetric_grid(opt.grid, l).
std::vector<double> recheck_residuals(const Branch& branch, const RadialEquilibrium& eq,
                                      const NutrientFn& f, const FieldOptions& opt);

struct ProbeResult {
  bool inconclusive = false;  // G too close to a bifurcation value of this symmetry
  int attempts = 0;
  int returned_to_zero = 0;
  std::vector<ShapeCoeffs> nonzero_solutions;  // findings
  std::vector<std::string> failures;           // attempts whose Newton solve failed
  bool ok() const { return !inconclusive && attempts > 0 && returned_to_zero == attempts; }
};

/// Local uniqueness check of the trivial solution at fixed G: Newton solves
/// on the even 2pi/l-periodic shapes from random perturbations of sup norm
/// `amplitude`. Throws DomainError when G < G_bullet; flags the probe
/// inconclusive when the linearization at rho = 0 is not invertible on the
/// even 2pi/l-periodic shapes.
ProbeResult non_bifurcation_probe(double G, int l, const SymbolTable& table,
                                  const RadialEquilibrium& eq, const NutrientFn& f,
                                  int attempts = 10, std::uint64_t seed = 1,
                                  const ContinuationOptions& opt = {}, double amplitude = 1e-3);

}  // namespace tumorbif
