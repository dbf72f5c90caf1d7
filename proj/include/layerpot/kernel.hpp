#pragma once

#include "layerpot/geometry.hpp"

namespace layerpot {

// Γ(s) for real s away from the poles. Integers and half-integers up to 170
// are evaluated by exact recursion; other arguments use a g=7, n=9 Lanczos
// approximation (relative error below 1e-14 on (0, 170)).
double gamma_function(double s);

// ω_N = 2π^{N/2} / Γ(N/2), the surface area of the unit sphere in R^N.
double sphere_area_constant(int n);

// Fundamental solution of the Laplacian in R^N:
//   E(x) = ln|x| / 2π            (N = 2)
//   E(x) = 1 / ((2-N) ω_N |x|^{N-2})  (N >= 3)
// |x| below 1e-300 is treated as the singularity.
class FundamentalSolution {
 public:
  explicit FundamentalSolution(int dim);

  int dim() const noexcept { return dim_; }
  double omega() const noexcept { return omega_; }

  double value(const Point& x) const;
  // ∇E(x) = x / (ω_N |x|^N)
  Point gradient(const Point& x) const;
  // ⟨∇E(x), ν⟩; ν must be a unit vector.
  double normal_derivative(const Point& x, const Point& nu) const;

 private:
  int dim_;
  double omega_;
};

double fundamental_solution(const Point& x);
Point grad_fundamental_solution(const Point& x);
double normal_derivative_fundamental_solution(const Point& x, const Point& nu);

}  // namespace layerpot
