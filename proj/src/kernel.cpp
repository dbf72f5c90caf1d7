#include "layerpot/kernel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "layerpot/errors.hpp"

namespace layerpot {

namespace {

constexpr double kMinRadius = 1e-300;

double lanczos_gamma(double s) {
  static constexpr std::array<double, 9> kCoeff = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (s < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * s) * lanczos_gamma(1.0 - s));
  }
  s -= 1.0;
  double a = kCoeff[0];
  const double t = s + 7.5;
  for (int i = 1; i < 9; ++i) a += kCoeff[i] / (s + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, s + 0.5) * std::exp(-t) * a;
}

}  // namespace

double gamma_function(double s) {
  if (!std::isfinite(s)) fail(ErrorKind::Parameter, "gamma_function: argument is not finite");
  if (s <= 0.0 && s == std::floor(s)) {
    fail(ErrorKind::Domain, "gamma_function: pole at non-positive integer " + std::to_string(s));
  }
  if (s > 0.0 && s <= 170.0) {
    if (s == std::floor(s)) {
      double g = 1.0;
      for (int k = 2; k < static_cast<int>(s); ++k) g *= k;
      return g;
    }
    if (2.0 * s == std::floor(2.0 * s)) {
      // Γ(k + 1/2) = (k - 1/2)(k - 3/2)...(1/2) √π
      double g = std::sqrt(std::numbers::pi);
      for (double t = 0.5; t < s; t += 1.0) g *= t;
      return g;
    }
  }
  return lanczos_gamma(s);
}

double sphere_area_constant(int n) {
  if (n < 2) fail(ErrorKind::Domain, "sphere_area_constant: dimension must be >= 2, got " + std::to_string(n));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_function(0.5 * n);
}

FundamentalSolution::FundamentalSolution(int dim) : dim_(dim), omega_(0.0) {
  if (dim < 2 || dim > kMaxDim) {
    fail(ErrorKind::Dimension, "fundamental solution: unsupported dimension " + std::to_string(dim));
  }
  omega_ = sphere_area_constant(dim);
}

double FundamentalSolution::value(const Point& x) const {
  if (x.dim() != dim_) fail(ErrorKind::Dimension, "fundamental solution: point dimension mismatch");
  const double r = x.norm();
  if (!(r >= kMinRadius)) fail(ErrorKind::Singularity, "fundamental solution evaluated at the origin");
  double v;
  if (dim_ == 2) {
    v = std::log(r) / (2.0 * std::numbers::pi);
  } else {
    v = 1.0 / ((2.0 - dim_) * omega_ * std::pow(r, dim_ - 2));
  }
  if (!std::isfinite(v)) fail(ErrorKind::Singularity, "fundamental solution overflows near the origin");
  return v;
}

Point FundamentalSolution::gradient(const Point& x) const {
  if (x.dim() != dim_) fail(ErrorKind::Dimension, "fundamental solution: point dimension mismatch");
  const double r = x.norm();
  if (!(r >= kMinRadius)) fail(ErrorKind::Singularity, "gradient of the fundamental solution at the origin");
  // x/|x| scaled by 1/(ω |x|^{N-1}) keeps the intermediate values in range.
  const double scale = 1.0 / (omega_ * std::pow(r, dim_ - 1));
  if (!std::isfinite(scale)) fail(ErrorKind::Singularity, "gradient of the fundamental solution overflows");
  return x * (scale / r);
}

double FundamentalSolution::normal_derivative(const Point& x, const Point& nu) const {
  if (nu.dim() != dim_) fail(ErrorKind::Dimension, "normal derivative: normal dimension mismatch");
  if (std::abs(nu.norm() - 1.0) > 1e-8) fail(ErrorKind::Parameter, "normal derivative: normal is not a unit vector");
  return dot(gradient(x), nu);
}

double fundamental_solution(const Point& x) { return FundamentalSolution(x.dim()).value(x); }

Point grad_fundamental_solution(const Point& x) { return FundamentalSolution(x.dim()).gradient(x); }

double normal_derivative_fundamental_solution(const Point& x, const Point& nu) {
  return FundamentalSolution(x.dim()).normal_derivative(x, nu);
}

}  // namespace layerpot
