#include "tumorbif/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "tumorbif/errors.hpp"

namespace tumorbif {

NutrientFn NutrientFn::identity() { return NutrientFn{}; }

NutrientFn NutrientFn::michaelis_menten(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("Michaelis-Menten rate sigma must be positive");
  NutrientFn f;
  f.kind_ = Kind::MichaelisMenten;
  f.sigma_ = sigma;
  f.name_ = "michaelis_menten";
  return f;
}

NutrientFn NutrientFn::custom(Scalar value, Scalar derivative, std::string name) {
  if (!value || !derivative) throw ParameterError("custom nutrient law needs both f and f'");
  NutrientFn f;
  f.kind_ = Kind::Custom;
  f.name_ = std::move(name);
  f.value_ = std::move(value);
  f.derivative_ = std::move(derivative);
  return f;
}

double NutrientFn::value(double psi) const {
  switch (kind_) {
    case Kind::Identity:
      return psi;
    case Kind::MichaelisMenten:
      return sigma_ * psi / (1.0 + psi);
    case Kind::Custom:
      return value_(psi);
  }
  return 0.0;
}

double NutrientFn::derivative(double psi) const {
  switch (kind_) {
    case Kind::Identity:
      return 1.0;
    case Kind::MichaelisMenten: {
      const double d = 1.0 + psi;
      return sigma_ / (d * d);
    }
    case Kind::Custom:
      return derivative_(psi);
  }
  return 0.0;
}

double eval_f(const NutrientFn& f, double psi) {
  if (!(psi >= 0.0)) throw DomainError("nutrient value must be nonnegative");
  return f.value(psi);
}

double eval_f_prime(const NutrientFn& f, double psi) {
  if (!(psi >= 0.0)) throw DomainError("nutrient value must be nonnegative");
  const double d = f.derivative(psi);
  if (!(d > 0.0)) {
    std::ostringstream os;
    os << "f'(" << psi << ") = " << d << " is not positive";
    throw ParameterError(os.str());
  }
  return d;
}

void check_admissible(const NutrientFn& f, double psi_max, int samples) {
  if (f.value(0.0) != 0.0) throw ParameterError("f(0) must vanish");
  for (int i = 0; i < samples; ++i) {
    const double psi = psi_max * i / (samples - 1);
    eval_f_prime(f, psi);
  }
}

const ModelParams& validate_params(const ModelParams& p) {
  if (p.f.kind() == NutrientFn::Kind::Custom) check_admissible(p.f);
  const double f1 = p.f.value(1.0);
  if (!(p.A > 0.0)) {
    std::ostringstream os;
    os << "A = " << p.A << " violates the lower bound A > 0";
    throw ParameterError(os.str());
  }
  if (!(p.A < f1)) {
    std::ostringstream os;
    os << "A = " << p.A << " violates the upper bound A < f(1) = " << f1;
    throw ParameterError(os.str());
  }
  return p;
}

}  // namespace tumorbif
