#pragma once

#include "oracle/bessel_series.hpp"
#include "tumorbif/radial.hpp"
#include "tumorbif/spectrum.hpp"

namespace fixtures {

// f = id with A chosen so that R_A = 1; computed from the series oracle.
inline double unit_A() { return oracle::A_for_radius(1.0); }

inline const tumorbif::RadialEquilibrium& unit_equilibrium() {
  static const tumorbif::RadialEquilibrium eq = tumorbif::find_RA(unit_A(), tumorbif::NutrientFn::identity());
  return eq;
}

inline const tumorbif::SymbolTable& unit_table() {
  static const tumorbif::SymbolTable t =
      tumorbif::SymbolTable::assemble(unit_equilibrium(), tumorbif::NutrientFn::identity(), 64);
  return t;
}

}  // namespace fixtures
