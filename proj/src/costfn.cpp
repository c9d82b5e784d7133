#include "hgfc/costfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace hgfc {

namespace {

constexpr double kTol = 1e-12;

void require(bool cond, const char* msg) {
  if (!cond) throw BadConfig(msg);
}

}  // namespace

CostFunction CostFunction::scaled_linear(double rho, double shift) {
  require(rho >= 0, "scaled_linear: rho must be nonnegative");
  CostFunction g;
  g.family = CostFamily::ScaledLinear;
  g.rho = rho;
  g.shift = shift;
  return g;
}

CostFunction CostFunction::scaled_power(double rho, double k, double shift) {
  require(rho >= 0, "scaled_power: rho must be nonnegative");
  require(k >= 1.0, "scaled_power: exponent must be >= 1");
  CostFunction g;
  g.family = CostFamily::ScaledPower;
  g.rho = rho;
  g.power = k;
  g.shift = shift;
  return g;
}

CostFunction CostFunction::polynomial(std::vector<double> coeffs, double shift) {
  for (double a : coeffs) require(a >= 0, "polynomial: coefficients must be nonnegative");
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  CostFunction g;
  g.family = CostFamily::Polynomial;
  g.coeffs = std::move(coeffs);
  g.shift = shift;
  return g;
}

CostFunction CostFunction::scaled_log(double rho, double shift) {
  require(rho >= 0, "scaled_log: rho must be nonnegative");
  CostFunction g;
  g.family = CostFamily::ScaledLog;
  g.rho = rho;
  g.shift = shift;
  return g;
}

CostFunction CostFunction::piecewise_linear(std::vector<std::pair<double, double>> points,
                                            double shift) {
  require(points.size() >= 2, "piecewise_linear: need at least two breakpoints");
  require(std::abs(points.front().first) < kTol && std::abs(points.front().second) < kTol,
          "piecewise_linear: first breakpoint must be (0, 0)");
  for (size_t i = 1; i < points.size(); ++i) {
    require(points[i].first > points[i - 1].first, "piecewise_linear: x must increase");
    require(points[i].second >= points[i - 1].second - kTol,
            "piecewise_linear: y must be nondecreasing");
  }
  CostFunction g;
  g.family = CostFamily::PiecewiseLinear;
  g.points = std::move(points);
  g.shift = shift;
  return g;
}

double CostFunction::core_value(double x) const {
  if (x <= 0) return 0.0;
  switch (family) {
    case CostFamily::ScaledLinear:
      return rho * x;
    case CostFamily::ScaledPower:
      return rho * std::pow(x, power);
    case CostFamily::Polynomial: {
      // Horner over a_1 x + a_2 x^2 + ...
      double acc = 0.0;
      for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
      return acc * x;
    }
    case CostFamily::ScaledLog:
      return rho * std::log1p(x);
    case CostFamily::PiecewiseLinear: {
      size_t i = 1;
      while (i + 1 < points.size() && points[i].first < x) ++i;
      auto [x0, y0] = points[i - 1];
      auto [x1, y1] = points[i];
      double slope = (y1 - y0) / (x1 - x0);
      if (x > x1) return y1 + slope * (x - x1);  // only reachable on the last segment
      return y0 + slope * (x - x0);
    }
  }
  return 0.0;
}

double CostFunction::core_deriv(double x) const {
  if (x < 0) return 0.0;
  switch (family) {
    case CostFamily::ScaledLinear:
      return rho;
    case CostFamily::ScaledPower:
      if (x == 0.0) return power == 1.0 ? rho : 0.0;
      return rho * power * std::pow(x, power - 1.0);
    case CostFamily::Polynomial: {
      double acc = 0.0;
      for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i] * double(i + 1);
      return acc;
    }
    case CostFamily::ScaledLog:
      return rho / (1.0 + x);
    case CostFamily::PiecewiseLinear: {
      size_t i = 1;
      // right-continuous derivative: at a breakpoint take the right segment
      while (i + 1 < points.size() && points[i].first <= x) ++i;
      auto [x0, y0] = points[i - 1];
      auto [x1, y1] = points[i];
      (void)x0;
      (void)y0;
      return (y1 - y0) / (x1 - x0);
    }
  }
  return 0.0;
}

double CostFunction::core_deriv2(double x) const {
  switch (family) {
    case CostFamily::ScaledLinear:
      return 0.0;
    case CostFamily::ScaledPower:
      if (power == 1.0) return 0.0;
      if (x <= 0.0) return power == 2.0 ? 2.0 * rho : 0.0;
      return rho * power * (power - 1.0) * std::pow(x, power - 2.0);
    case CostFamily::Polynomial: {
      if (x < 0) return 0.0;
      double acc = 0.0;
      for (size_t i = coeffs.size(); i-- > 1;) acc = acc * x + coeffs[i] * double(i + 1) * double(i);
      return acc;
    }
    case CostFamily::ScaledLog:
      return -rho / ((1.0 + x) * (1.0 + x));
    case CostFamily::PiecewiseLinear:
      for (size_t i = 1; i + 1 < points.size(); ++i) {
        if (std::abs(points[i].first - x) < kTol)
          throw NotDifferentiable("piecewise-linear cost has no second derivative at breakpoint");
      }
      return 0.0;
  }
  return 0.0;
}

double CostFunction::core_antideriv(double x) const {
  if (x <= 0) return 0.0;
  switch (family) {
    case CostFamily::ScaledLinear:
      return rho * x * x / 2.0;
    case CostFamily::ScaledPower:
      return rho * std::pow(x, power + 1.0) / (power + 1.0);
    case CostFamily::Polynomial: {
      double acc = 0.0;
      double xp = x * x;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        acc += coeffs[i] * xp / double(i + 2);
        xp *= x;
      }
      return acc;
    }
    case CostFamily::ScaledLog:
      // integral of log(1+u) du = (1+u)log(1+u) - u
      return rho * ((1.0 + x) * std::log1p(x) - x);
    case CostFamily::PiecewiseLinear: {
      double acc = 0.0;
      double prev_x = 0.0, prev_y = 0.0;
      for (size_t i = 1; i < points.size(); ++i) {
        auto [bx, by] = points[i];
        if (x <= bx || i + 1 == points.size()) {
          double slope = (by - prev_y) / (bx - prev_x);
          double seg_end = std::min(x, bx);
          if (i + 1 == points.size()) seg_end = x;  // extrapolate last segment
          double w = seg_end - prev_x;
          double y_end = prev_y + slope * w;
          acc += 0.5 * (prev_y + y_end) * w;
          if (x <= bx || i + 1 == points.size()) return acc;
        } else {
          acc += 0.5 * (prev_y + by) * (bx - prev_x);
        }
        prev_x = bx;
        prev_y = by;
      }
      return acc;
    }
  }
  return 0.0;
}

double CostFunction::value(double t) const { return core_value(t - shift); }
double CostFunction::deriv(double t) const { return core_deriv(t - shift); }
double CostFunction::deriv2(double t) const { return core_deriv2(t - shift); }

double CostFunction::evaluate(double t, int order) const {
  switch (order) {
    case 0:
      return value(t);
    case 1:
      return deriv(t);
    case 2:
      return deriv2(t);
    default:
      throw BadConfig("evaluate: order must be 0, 1 or 2");
  }
}

double CostFunction::definite_integral(double a, double b) const {
  if (b < a) throw BadConfig("definite_integral: requires a <= b");
  return core_antideriv(b - shift) - core_antideriv(a - shift);
}

bool CostFunction::is_convex() const {
  switch (family) {
    case CostFamily::ScaledLinear:
      return true;
    case CostFamily::ScaledPower:
      return power >= 1.0;
    case CostFamily::Polynomial:
      return true;  // nonnegative coefficients of x^k, k >= 1
    case CostFamily::ScaledLog:
      return rho == 0.0;
    case CostFamily::PiecewiseLinear: {
      double prev_slope = -std::numeric_limits<double>::infinity();
      for (size_t i = 1; i < points.size(); ++i) {
        double slope = (points[i].second - points[i - 1].second) /
                       (points[i].first - points[i - 1].first);
        if (slope < prev_slope - kTol) return false;
        prev_slope = slope;
      }
      return true;
    }
  }
  return false;
}

CostFunction CostFunction::scaled_by(double c) const {
  CostFunction g = *this;
  switch (family) {
    case CostFamily::ScaledLinear:
    case CostFamily::ScaledPower:
    case CostFamily::ScaledLog:
      g.rho *= c;
      break;
    case CostFamily::Polynomial:
      for (double& a : g.coeffs) a *= c;
      break;
    case CostFamily::PiecewiseLinear:
      for (auto& [x, y] : g.points) y *= c;
      break;
  }
  return g;
}

double curvature_K(std::span<const CostFunction> functions) {
  double sup = 0.0;  // t=0 always contributes 0, so K >= 1
  for (const auto& g : functions) {
    switch (g.family) {
      case CostFamily::ScaledLinear:
      case CostFamily::ScaledLog:
      case CostFamily::PiecewiseLinear:
        break;
      case CostFamily::ScaledPower:
        sup = std::max(sup, g.power - 1.0);
        break;
      case CostFamily::Polynomial: {
        // ratio = sum k(k-1) a_k x^k / sum k a_k x^k -> (d-1) as x -> inf
        for (size_t i = 0; i < g.coeffs.size(); ++i)
          if (g.coeffs[i] > 0) sup = std::max(sup, double(i + 1) - 1.0);
        break;
      }
    }
  }
  return 1.0 + sup;
}

double curvature_K_numeric(std::span<const CostFunction> functions, double horizon) {
  double sup = 0.0;
  for (const auto& g : functions) {
    if (g.family == CostFamily::PiecewiseLinear) continue;  // smoothed: contributes 0
    double prev = 0.0;
    double at_cap = 0.0;
    double lo = horizon * 1e-6;
    // 256 points per decade on a geometric grid
    double step = std::pow(10.0, 1.0 / 256.0);
    for (double x = lo; x <= horizon * (1 + 1e-12); x *= step) {
      double d1 = g.deriv(g.shift + x);
      if (d1 <= 0) continue;
      double ratio = x * g.deriv2(g.shift + x) / d1;
      sup = std::max(sup, ratio);
      prev = at_cap;
      at_cap = ratio;
    }
    if (at_cap > prev + 1e-9 && at_cap > 64.0)
      throw UnboundedCurvature("curvature ratio still growing at the probed horizon");
  }
  return 1.0 + std::max(0.0, sup);
}

namespace {

double theta_ratio(const CostFunction& g, double t, double v) {
  double d1 = g.deriv(g.shift + t);
  if (d1 <= 0) return 0.0;
  return (g.value(g.shift + t + v) - g.value(g.shift + t)) / (v * d1);
}

double theta_for_length(const CostFunction& g, double v, double horizon) {
  switch (g.family) {
    case CostFamily::ScaledLinear:
      return g.rho > 0 ? 1.0 : 0.0;
    case CostFamily::ScaledPower:
      if (g.rho == 0) return 0.0;
      if (g.power == 1.0) return 1.0;
      if (g.power == 2.0) return theta_ratio(g, v, v);  // decreasing in t, sup at t = v
      break;
    case CostFamily::Polynomial:
      if (g.coeffs.empty()) return 0.0;
      if (g.coeffs.size() == 1) return 1.0;
      if (g.coeffs.size() == 2) return theta_ratio(g, v, v);  // 1 + a v/(2at+b), sup at t = v
      break;
    default:
      break;
  }
  // Geometric grid over [v, horizon] with a dense linear head near t = v.
  double sup = 0.0;
  double prev = 0.0, last = 0.0;
  for (int i = 0; i <= 64; ++i) {
    double t = v * (1.0 + i / 64.0);
    sup = std::max(sup, theta_ratio(g, t, v));
  }
  double step = std::pow(10.0, 1.0 / 256.0);
  for (double t = v; t <= std::max(horizon, 2 * v) * (1 + 1e-12); t *= step) {
    double r = theta_ratio(g, t, v);
    sup = std::max(sup, r);
    prev = last;
    last = r;
  }
  if (last > prev + 1e-9 && last >= sup - 1e-12 && last > 64.0)
    throw UnboundedTheta("stretch ratio still growing at the probed horizon");
  return sup;
}

}  // namespace

double stretch_theta(std::span<const CostFunction> functions, std::span<const double> lengths,
                     double horizon, bool conservative) {
  if (lengths.empty()) throw BadConfig("stretch_theta: lengths must be nonempty");
  std::vector<double> vs;
  if (conservative) {
    vs.push_back(*std::min_element(lengths.begin(), lengths.end()));
  } else {
    vs.assign(lengths.begin(), lengths.end());
  }
  double sup = 0.0;
  for (const auto& g : functions)
    for (double v : vs) sup = std::max(sup, theta_for_length(g, v, horizon));
  return sup;
}

double d_constant(const CostFunction& g, double r, double v) {
  if (v <= 0) throw BadConfig("d_constant: length must be positive");
  return g.definite_integral(r, r + v) / v;
}

std::string CostFunction::to_json() const {
  nlohmann::json j;
  switch (family) {
    case CostFamily::ScaledLinear:
      j["family"] = "linear";
      j["rho"] = rho;
      break;
    case CostFamily::ScaledPower:
      j["family"] = "power";
      j["rho"] = rho;
      j["k"] = power;
      break;
    case CostFamily::Polynomial:
      j["family"] = "poly";
      j["coeffs"] = coeffs;
      break;
    case CostFamily::ScaledLog:
      j["family"] = "log";
      j["rho"] = rho;
      break;
    case CostFamily::PiecewiseLinear: {
      j["family"] = "pwl";
      auto arr = nlohmann::json::array();
      for (auto& [x, y] : points) arr.push_back({x, y});
      j["breakpoints"] = arr;
      break;
    }
  }
  if (shift != 0.0) j["shift"] = shift;
  return j.dump();
}

CostFunction CostFunction::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string fam = j.at("family").get<std::string>();
  double shift = j.value("shift", 0.0);
  if (fam == "linear") return scaled_linear(j.at("rho").get<double>(), shift);
  if (fam == "power")
    return scaled_power(j.at("rho").get<double>(), j.at("k").get<double>(), shift);
  if (fam == "poly") return polynomial(j.at("coeffs").get<std::vector<double>>(), shift);
  if (fam == "log") return scaled_log(j.at("rho").get<double>(), shift);
  if (fam == "pwl") {
    std::vector<std::pair<double, double>> pts;
    for (auto& p : j.at("breakpoints")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return piecewise_linear(std::move(pts), shift);
  }
  throw BadConfig("unknown cost family: " + fam);
}

}  // namespace hgfc
