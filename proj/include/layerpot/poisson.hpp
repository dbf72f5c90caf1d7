#pragma once

#include <functional>
#include <vector>

#include "layerpot/fields.hpp"
#include "layerpot/geometry.hpp"

namespace layerpot {

using BoundaryData = std::function<double(const Point&)>;

// Largest |y-a|/R at which Poisson integrals are evaluated.
inline constexpr double kPoissonRadiusFraction = 0.95;

// u(y) = (R² - |y-a|²)/(R ω_N) ∫_{∂B_R(a)} φ(x) / |x-y|^N dσ(x).
// Domain error unless |y-a| <= 0.95 R.
double poisson_evaluate(const Ball& ball, const BoundaryData& phi, const Point& y, int order);

// (R² - |y-a|²)/(R ω_N) ∫_{∂B} |x-y|^{-N} dσ, which should equal 1.
double poisson_kernel_mass(const Ball& ball, const Point& y, int order);

struct MeanValues {
  double surface_mean = 0.0;
  double volume_mean = 0.0;
  double center_value = 0.0;
};

MeanValues mean_value_check(const ScalarField& u, const Ball& ball, int order = 64);

// Harmonic extension of boundary data through the Poisson integral at a fixed
// base order (raised near the sphere as for poisson_evaluate).
// boundary_values() holds the data at the nodes of the standard rule.
class DirichletSolution {
 public:
  DirichletSolution(Ball ball, const BoundaryData& phi, int order);

  const Ball& ball() const noexcept { return ball_; }
  int order() const noexcept { return order_; }
  std::span<const double> boundary_values() const noexcept { return values_; }

  double evaluate(const Point& y) const;
  double operator()(const Point& y) const { return evaluate(y); }

 private:
  Ball ball_;
  int order_;
  BoundaryData phi_;
  std::vector<double> values_;
};

// χ solving Δχ = 0 in B, χ = f on ∂B.
DirichletSolution dirichlet_chi(const Ball& ball, const ScalarField& f, int order);

}  // namespace layerpot
