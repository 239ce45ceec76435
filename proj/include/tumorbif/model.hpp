#pragma once

#include <functional>
#include <string>

namespace tumorbif {

/// Nutrient consumption law f with f(0) = 0 and f' > 0 on [0, inf).
///
/// Two built-in laws are provided. A user-defined law must supply both the
/// value and the derivative; admissibility of a user law is checked on a
/// sampling grid by validate_params().
class NutrientFn {
 public:
  enum class Kind { Identity, MichaelisMenten, Custom };
  using Scalar = std::function<double(double)>;

  static NutrientFn identity();
  /// f(psi) = sigma * psi / (1 + psi), sigma > 0.
  static NutrientFn michaelis_menten(double sigma);
  static NutrientFn custom(Scalar value, Scalar derivative, std::string name = "custom");

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  const std::string& name() const { return name_; }

  // Unchecked evaluation. Prefer eval_f / eval_f_prime at API boundaries.
  double value(double psi) const;
  double derivative(double psi) const;

 private:
  NutrientFn() = default;

  Kind kind_ = Kind::Identity;
  double sigma_ = 1.0;
  std::string name_ = "identity";
  Scalar value_;
  Scalar derivative_;
};

struct ModelParams {
  double A = 0.5;  // apoptosis / mitosis balance
  double G = 0.0;  // relative mitosis rate
  NutrientFn f = NutrientFn::identity();
};

double eval_f(const NutrientFn& f, double psi);
double eval_f_prime(const NutrientFn& f, double psi);

/// Checks f(0) = 0 and f' > 0 on [0, psi_max] sampled on `samples` points.
/// Throws ParameterError naming the first violation.
void check_admissible(const NutrientFn& f, double psi_max = 2.0, int samples = 1000);

/// Returns p unchanged iff 0 < A < f(1) and f is admissible.
const ModelParams& validate_params(const ModelParams& p);

}  // namespace tumorbif
