#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hgfc/costfn.hpp"
#include "hgfc/experiment.hpp"

using namespace hgfc;

namespace {

double central_diff(const CostFunction& g, double t, int order) {
  double h = 1e-5 * std::max(1.0, std::abs(t));
  if (order == 1) return (g.value(t + h) - g.value(t - h)) / (2 * h);
  return (g.value(t + h) - 2 * g.value(t) + g.value(t - h)) / (h * h);
}

// trapezoid refinement until two halvings agree
double quadrature(const CostFunction& g, double a, double b, double tol = 1e-11) {
  int n = 8;
  double prev = 0.0;
  for (int iter = 0; iter < 22; ++iter) {
    double h = (b - a) / n;
    double sum = 0.5 * (g.value(a) + g.value(b));
    for (int i = 1; i < n; ++i) sum += g.value(a + i * h);
    double cur = sum * h;
    if (iter > 2 && std::abs(cur - prev) < tol * (1 + std::abs(cur))) return cur;
    prev = cur;
    n *= 2;
  }
  return prev;
}

std::vector<CostFunction> sample_families() {
  return {
      CostFunction::scaled_linear(3.0),
      CostFunction::scaled_power(1.5, 2.0),
      CostFunction::scaled_power(2.0, 3.0, 1.0),
      CostFunction::polynomial({0.5, 0.25, 0.1}),
      CostFunction::scaled_log(2.0),
      CostFunction::piecewise_linear({{0, 0}, {1, 2}, {3, 5}, {4, 9}}),
  };
}

}  // namespace

TEST_CASE("evaluate per family") {
  CHECK(CostFunction::scaled_linear(3.0).evaluate(2.0, 0) == doctest::Approx(6.0));
  CHECK(CostFunction::scaled_power(1.0, 2.0).evaluate(3.0, 1) == doctest::Approx(6.0));
  // second derivative of 2 log(1+t) at t = 1
  CostFunction lg = CostFunction::scaled_log(2.0);
  CHECK(lg.evaluate(1.0, 2) == doctest::Approx(-0.5));
  CHECK(lg.evaluate(1.0, 2) == doctest::Approx(central_diff(lg, 1.0, 2)).epsilon(1e-4));
}

TEST_CASE("values are zero before the shift") {
  CostFunction g = CostFunction::scaled_power(2.0, 2.0, 3.0);
  CHECK(g.value(3.0) == 0.0);
  CHECK(g.value(1.0) == 0.0);
  CHECK(g.value(4.0) == doctest::Approx(2.0));
}

TEST_CASE("derivatives match finite differences") {
  Rng rng(7);
  for (const auto& g : sample_families()) {
    for (int i = 0; i < 100; ++i) {
      double t = g.shift + rng.uniform_real(0.1, 20.0);
      if (g.family == CostFamily::PiecewiseLinear) {
        // keep clear of breakpoints where one-sided slopes differ
        bool near = false;
        for (auto& [x, y] : g.points)
          if (std::abs((t - g.shift) - x) < 1e-3) near = true;
        if (near) continue;
      }
      CHECK(g.deriv(t) == doctest::Approx(central_diff(g, t, 1)).epsilon(1e-6));
    }
  }
}

TEST_CASE("monotone and nonnegative on a dense grid") {
  for (const auto& g : sample_families()) {
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
      double t = g.shift + i * 0.05;
      double v = g.value(t);
      CHECK(v >= 0.0);
      CHECK(v >= prev - 1e-12);
      CHECK(g.deriv(t) >= 0.0);
      prev = v;
    }
  }
}

TEST_CASE("definite integral matches quadrature") {
  CHECK(CostFunction::scaled_linear(1.0).definite_integral(0, 2) == doctest::Approx(2.0));
  CHECK(CostFunction::scaled_power(1.0, 2.0).definite_integral(1, 2) ==
        doctest::Approx(7.0 / 3.0));
  for (const auto& g : sample_families()) {
    CHECK(g.definite_integral(g.shift + 1.0, g.shift + 1.0) == 0.0);
    double exact = g.definite_integral(g.shift + 0.5, g.shift + 7.5);
    CHECK(exact == doctest::Approx(quadrature(g, g.shift + 0.5, g.shift + 7.5)).epsilon(1e-9));
  }
}

TEST_CASE("pwl second derivative at a breakpoint is flagged") {
  CostFunction g = CostFunction::piecewise_linear({{0, 0}, {1, 1}, {2, 3}});
  CHECK_THROWS_AS(g.evaluate(1.0, 2), NotDifferentiable);
  CHECK(g.evaluate(0.5, 2) == 0.0);
}

TEST_CASE("curvature constant per family") {
  std::vector<CostFunction> log_only = {CostFunction::scaled_log(1.0),
                                        CostFunction::scaled_log(4.0)};
  CHECK(curvature_K(log_only) == doctest::Approx(1.0));
  std::vector<CostFunction> lin = {CostFunction::scaled_linear(2.0)};
  CHECK(curvature_K(lin) == doctest::Approx(1.0));
  for (double k : {2.0, 3.0, 5.0}) {
    std::vector<CostFunction> pw = {CostFunction::scaled_power(1.5, k)};
    CHECK(curvature_K(pw) == doctest::Approx(k));
  }
  std::vector<CostFunction> poly = {CostFunction::polynomial({1.0, 0.5, 0.25})};
  CHECK(curvature_K(poly) == doctest::Approx(3.0));
  // numeric probe agrees (its sup is approached, not attained, for polys)
  CHECK(curvature_K_numeric(poly, 1e6) == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(curvature_K_numeric(log_only, 1e4) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stretch constant") {
  std::vector<double> lengths = {1.0, 2.0, 4.0};
  std::vector<CostFunction> lin = {CostFunction::scaled_linear(3.0)};
  CHECK(stretch_theta(lin, lengths, 50.0) == doctest::Approx(1.0));
  // g = t^2, v = 1: ratio (2t+1)/2t is largest at t = v = 1
  std::vector<CostFunction> sq = {CostFunction::scaled_power(1.0, 2.0)};
  std::vector<double> unit = {1.0};
  CHECK(stretch_theta(sq, unit, 10.0) == doctest::Approx(1.5));
  // quadratics with jobs of length >= 1 stay below 2
  std::vector<CostFunction> quads = {CostFunction::polynomial({0.3, 1.2}),
                                     CostFunction::polynomial({2.0, 0.4})};
  double theta = stretch_theta(quads, lengths, 100.0);
  CHECK(theta <= 2.0);
  CHECK(theta > 1.0);
}

TEST_CASE("d constant") {
  CHECK(d_constant(CostFunction::scaled_linear(1.0), 0, 2) == doctest::Approx(1.0));
  CHECK(d_constant(CostFunction::scaled_power(1.0, 2.0), 0, 3) == doctest::Approx(3.0));
  CHECK(d_constant(CostFunction::scaled_linear(0.0), 1, 5) == 0.0);
}

TEST_CASE("json round trip") {
  for (const auto& g : sample_families()) {
    CostFunction back = CostFunction::from_json(g.to_json());
    for (double t : {0.3, 1.7, 5.9})
      CHECK(back.value(g.shift + t) == doctest::Approx(g.value(g.shift + t)));
  }
}
