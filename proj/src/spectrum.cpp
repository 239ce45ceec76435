#include "tumorbif/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tumorbif/errors.hpp"

namespace tumorbif {

SymbolTable SymbolTable::from_ratios(double R_A, double A, double f1, std::vector<double> ratios) {
  SymbolTable t;
  t.R_A = R_A;
  t.A = A;
  t.f1 = f1;
  t.ratio = std::move(ratios);
  t.denom.resize(t.ratio.size());
  for (std::size_t k = 0; k < t.ratio.size(); ++k) t.denom[k] = 0.5 * A * t.ratio[k] + A - f1;
  return t;
}

SymbolTable SymbolTable::from_modes(const RadialEquilibrium& eq, const NutrientFn& f,
                                    const std::vector<ModeSolution>& modes) {
  std::vector<double> ratios;
  ratios.reserve(modes.size());
  for (const ModeSolution& m : modes) ratios.push_back(m.ratio());
  return from_ratios(eq.R_A, eq.A, f.value(1.0), std::move(ratios));
}

SymbolTable SymbolTable::assemble(const RadialEquilibrium& eq, const NutrientFn& f, int k_max,
                                  const ModeOptions& opt) {
  return from_modes(eq, f, solve_modes(k_max, eq, f, opt));
}

double mu(int k, double G, const SymbolTable& table) {
  const int n = std::abs(k);
  if (n > table.k_max()) {
    std::ostringstream os;
    os << "mode " << k << " exceeds tabulated k_max = " << table.k_max();
    throw RangeError(os.str());
  }
  const double R3 = table.R_A * table.R_A * table.R_A;
  const double geo = (-static_cast<double>(n) * n * n + n) / R3;
  return geo - G * table.denom[n];
}

double degenerate_tolerance(const SymbolTable& table) { return 1e-9 * (table.f1 - table.A); }

double bif_value(int k, const SymbolTable& table) {
  if (k < 2) throw DomainError("bifurcation values are defined for k >= 2");
  if (k > table.k_max()) throw RangeError("mode exceeds tabulated k_max");
  const double d = table.denom[k];
  if (std::abs(d) <= degenerate_tolerance(table)) {
    std::ostringstream os;
    os << "denominator d_" << k << " = " << d << " is degenerate";
    throw DegenerateError(os.str());
  }
  const double R3 = table.R_A * table.R_A * table.R_A;
  return (-static_cast<double>(k) * k * k + k) / (R3 * d);
}

int find_k1(const SymbolTable& table) {
  const int kmax = table.k_max();
  // Scan down from the top: the admissible set is an upper interval.
  int k1 = -1;
  for (int k = kmax - 1; k >= 2; --k) {
    double gk = 0.0;
    double gk1 = 0.0;
    try {
      gk = bif_value(k, table);
      gk1 = bif_value(k + 1, table);
    } catch (const DegenerateError&) {
      break;
    }
    if (!(gk > 0.0 && gk < gk1)) break;
    k1 = k;
  }
  if (k1 < 0 || k1 >= kmax - 1) {
    std::ostringstream os;
    os << "no monotone tail of bifurcation values below k_max = " << kmax
       << "; increase k_max";
    throw SolverError(os.str());
  }
  return k1;
}

double g_bullet(const SymbolTable& table, int k1) {
  if (k1 < 0 || k1 > table.k_max()) throw RangeError("k1 outside the tabulated range");
  const double tol = degenerate_tolerance(table);
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k1; ++k) {
    const double v = std::abs(table.f1 - table.A - 0.5 * table.A * table.ratio[k]);
    if (v > tol) smallest = std::min(smallest, v);
  }
  if (!std::isfinite(smallest)) throw DegenerateError("all denominators up to k1 vanish");
  const double R3 = table.R_A * table.R_A * table.R_A;
  const double num = (static_cast<double>(k1) * k1 * k1 - k1) / R3;
  return num / smallest;
}

bool check_feri(const SymbolTable& table, double tol) { return std::abs(table.denom.at(0)) > tol; }

BifurcationPoint make_point(int l, int k, const SymbolTable& table) {
  if (l < 1 || k < 1) throw DomainError("symmetry order and branch index must be positive");
  BifurcationPoint p;
  p.l = l;
  p.k = k;
  p.mode = k * l;
  p.G = bif_value(p.mode, table);
  try {
    const int k1 = find_k1(table);
    p.within_theorem = p.mode > k1 && p.G > g_bullet(table, k1);
  } catch (const Error&) {
    p.within_theorem = false;
  }
  return p;
}

std::vector<BifurcationPoint> catalog(int l, int count, const SymbolTable& table) {
  if (l < 2) throw DomainError("catalog requires l >= 2");
  if (!check_feri(table)) throw DegenerateError("mode-0 denominator vanishes");
  const int k1 = find_k1(table);
  const double gb = g_bullet(table, k1);
  std::vector<BifurcationPoint> out;
  for (int k = 1; k * l <= table.k_max() && static_cast<int>(out.size()) < count; ++k) {
    const int mode = k * l;
    if (mode < std::max(2, k1 + 1)) continue;
    const double G = bif_value(mode, table);
    if (!(G > gb)) continue;
    if (std::abs(mu(mode, G, table)) > 1e-10 * std::max(1.0, std::abs(G * table.denom[mode])))
      throw SolverError("catalog entry fails the root check");
    out.push_back({mode, l, k, G, true});
  }
  if (static_cast<int>(out.size()) < count) throw RangeError("k_max too small for the requested catalog");
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.G < b.G; });
  return out;
}

double transversality(const BifurcationPoint& point, const SymbolTable& table) {
  if (point.mode > table.k_max()) throw RangeError("mode exceeds tabulated k_max");
  const double t = -table.denom[point.mode];
  if (point.within_theorem && !(t > 0.0)) {
    std::ostringstream os;
    os << "transversality fails at mode " << point.mode << ": -d = " << t;
    throw SolverError(os.str());
  }
  return t;
}

double min_symbol(double G, int l, const SymbolTable& table) {
  if (l < 1) throw DomainError("symmetry order must be positive");
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k * l <= table.k_max(); ++k) m = std::min(m, std::abs(mu(k * l, G, table)));
  return m;
}

bool is_isomorphism_at(double G, int l, const SymbolTable& table, double margin) {
  return min_symbol(G, l, table) > margin;
}

}  // namespace tumorbif
