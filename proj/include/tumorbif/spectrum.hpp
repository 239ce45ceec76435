#pragma once

#include <vector>

#include "tumorbif/mode_ode.hpp"

namespace tumorbif {

/// Tabulated denominators d_k = (A/2) u_k'(1)/u_k(1) + A - f(1) of the
/// linearization symbol, 0 <= k <= k_max.
struct SymbolTable {
  double R_A = 1.0;
  double A = 0.0;
  double f1 = 1.0;  // f(1)
  std::vector<double> ratio;  // u_k'(1) / u_k(1)
  std::vector<double> denom;  // d_k

  int k_max() const { return static_cast<int>(denom.size()) - 1; }

  static SymbolTable assemble(const RadialEquilibrium& eq, const NutrientFn& f, int k_max,
                              const ModeOptions& opt = {});
  static SymbolTable from_modes(const RadialEquilibrium& eq, const NutrientFn& f,
                                const std::vector<ModeSolution>& modes);
  /// Builds a table directly from mode ratios (for synthetic setups).
  static SymbolTable from_ratios(double R_A, double A, double f1, std::vector<double> ratios);
};

struct BifurcationPoint {
  int mode = 0;  // k * l
  int l = 1;
  int k = 1;
  double G = 0.0;
  bool within_theorem = true;  // G > G_bullet and mode > k1
};

/// mu_k(G) = -|k|^3/R_A^3 + |k|/R_A^3 - G d_|k|.
double mu(int k, double G, const SymbolTable& table);

/// Threshold below which |d_k| counts as zero, relative to f(1) - A.
double degenerate_tolerance(const SymbolTable& table);

/// Unique root G_k of mu_k for k >= 2.
double bif_value(int k, const SymbolTable& table);

/// Smallest k1 >= 2 such that 0 < G_k < G_{k+1} for k1 <= k < k_max.
int find_k1(const SymbolTable& table);

double g_bullet(const SymbolTable& table, int k1);

/// Nondegeneracy of mode 0: |d_0| > tol.
bool check_feri(const SymbolTable& table, double tol = 1e-8);

/// First `count` bifurcation values G_{kl} with kl > k1 and G_{kl} > G_bullet,
/// increasing.
std::vector<BifurcationPoint> catalog(int l, int count, const SymbolTable& table);

/// Bifurcation point for mode k*l regardless of the theorem's hypotheses.
BifurcationPoint make_point(int l, int k, const SymbolTable& table);

/// -d_{kl}, the G-derivative of the crossing eigenvalue. Throws SolverError
/// for a nonpositive value when the point satisfies the theorem's hypotheses.
double transversality(const BifurcationPoint& point, const SymbolTable& table);

/// True iff min over 0 <= m <= k_max/l of |mu_{ml}(G)| exceeds margin.
bool is_isomorphism_at(double G, int l, const SymbolTable& table, double margin = 1e-6);

/// Smallest |mu_{ml}(G)| over the l-periodic even modes.
double min_symbol(double G, int l, const SymbolTable& table);

}  // namespace tumorbif
