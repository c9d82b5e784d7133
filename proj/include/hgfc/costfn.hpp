#ifndef HGFC_COSTFN_HPP
#define HGFC_COSTFN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgfc/errors.hpp"

namespace hgfc {

enum class CostFamily { ScaledLinear, ScaledPower, Polynomial, ScaledLog, PiecewiseLinear };

// Nonnegative nondecreasing cost g(t) = phi(t - shift), with phi(0) = 0 and
// closed-form derivatives and antiderivatives per family. For t < shift the
// function evaluates to 0 (the job does not accrue cost before release).
class CostFunction {
 public:
  CostFunction() = default;

  static CostFunction scaled_linear(double rho, double shift = 0.0);
  static CostFunction scaled_power(double rho, double k, double shift = 0.0);
  // coeffs[i] is the coefficient of x^(i+1); there is no constant term.
  static CostFunction polynomial(std::vector<double> coeffs, double shift = 0.0);
  static CostFunction scaled_log(double rho, double shift = 0.0);
  // Breakpoints (x, y) in core coordinates, starting at (0, 0), y nondecreasing.
  // The last segment's slope extends to infinity.
  static CostFunction piecewise_linear(std::vector<std::pair<double, double>> points,
                                       double shift = 0.0);

  double value(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;  // NotDifferentiable at an interior pwl breakpoint
  double evaluate(double t, int order) const;

  // Exact closed-form integral of g over [a, b], a <= b.
  double definite_integral(double a, double b) const;

  bool is_convex() const;

  // Returns the same function with the multiplicative weight scaled by c.
  CostFunction scaled_by(double c) const;

  CostFamily family = CostFamily::ScaledLinear;
  double rho = 0.0;
  double power = 1.0;
  std::vector<double> coeffs;
  std::vector<std::pair<double, double>> points;
  double shift = 0.0;

  std::string to_json() const;
  static CostFunction from_json(const std::string& text);

 private:
  double core_value(double x) const;
  double core_deriv(double x) const;
  double core_deriv2(double x) const;
  double core_antideriv(double x) const;  // integral of phi from 0 to x
};

// K = 1 + sup over functions and t >= 0 of t*g''(t)/g'(t), taken over the
// core (unshifted) argument. Closed form per family.
double curvature_K(std::span<const CostFunction> functions);

// Grid-probed version of the same supremum, for cross-checks; throws
// UnboundedCurvature if the probe keeps growing at the horizon cap.
double curvature_K_numeric(std::span<const CostFunction> functions, double horizon);

// theta = sup over functions, v in lengths, t >= v of
// (g(t+v) - g(t)) / (v * g'(t)), over the core argument. Closed form for
// linear and quadratic shapes, geometric-grid sup otherwise up to `horizon`.
// With conservative = true only the minimum length is binding.
double stretch_theta(std::span<const CostFunction> functions, std::span<const double> lengths,
                     double horizon, bool conservative = false);

// d = (1/v) * integral of g over [r, r+v].
double d_constant(const CostFunction& g, double r, double v);

}  // namespace hgfc

#endif
