#pragma once

#include <functional>
#include <span>
#include <vector>

#include "layerpot/fields.hpp"
#include "layerpot/geometry.hpp"

namespace layerpot {

using Moment = std::function<double(const Point&)>;

struct LayerEvaluation {
  double value = 0.0;
  LocationClass location = LocationClass::Interior;
  int quadrature_order = 0;  // after near-boundary escalation
  // The target sat closer to ∂Ω than 2π·diam/order and the order was raised.
  bool warning = false;
  // Escalation hit its cap before the target was resolved.
  bool under_resolved = false;
};

// Boundary rule for a target off ∂Ω. Planar rules double from `order` until
// n·d >= 16·diam (cap kMaxEscalatedOrder); sphere rules grade the polar angle.
struct ResolvedBoundaryRule {
  BoundaryQuadrature rule;
  bool warning = false;         // d < 2π·diam/order
  bool under_resolved = false;  // still d < 2π·diam/n after the cap
};
ResolvedBoundaryRule resolved_boundary_rule(const Domain& domain, const Point& y, int order);

// ū_h(y) = ∫_{∂Ω} h(x) ⟨∇E(x-y), ν(x)⟩ dσ(x). Boundary targets use the
// smooth-kernel evaluation (coincident node replaced by the curvature limit
// κ/4π in 2-D, polar-angle Gauss rule on the sphere).
LayerEvaluation double_layer(const Moment& h, const Domain& domain, const Point& y, int order);
LayerEvaluation double_layer(const ScalarField& h, const Domain& domain, const Point& y, int order);

// Evaluates many targets concurrently; results are in input order.
std::vector<LayerEvaluation> double_layer_batch(const Moment& h, const Domain& domain,
                                                std::span<const Point> targets, int order);

struct JumpReport {
  double interior_limit = 0.0;
  double exterior_limit = 0.0;
  double boundary_value = 0.0;
  std::vector<double> distances;
  std::vector<double> interior_values;
  std::vector<double> exterior_values;
};

// Richardson extrapolation to d = 0 with the model L(d) = L0 + c d through the
// two smallest distances.
double richardson_limit(std::span<const double> distances, std::span<const double> values);

// One-sided limits of ū_h along y0 ∓ d ν(y0). Throws Resolution when a sample
// sequence is not monotone or a sample is under-resolved.
JumpReport jump_relation_check(const Moment& h, const Domain& domain, const Point& y0,
                               std::span<const double> distances, int order);

// ∫_Ω ⟨∇E(x-y), ∇f(x)⟩ dx for y ∉ ∂Ω.
double gradient_volume_integral(const ScalarField& f, const Domain& domain, const Point& y, int order);

enum class ZetaMode {
  Algebraic,  // ζ(z) = ū_f(z) - f(z)/2
  Limit,      // Richardson limit of the volume integral along the inner normal
};

// ζ(z) = lim_{t→z} ∫_Ω ⟨∇E(x-t), ∇f(x)⟩ dx at a boundary point z.
double boundary_limit_zeta(const ScalarField& f, const Domain& domain, const Point& z, int order,
                           ZetaMode mode = ZetaMode::Algebraic);

// Approach distances used by ZetaMode::Limit, as fractions of the diameter.
inline constexpr double kZetaLimitFractions[] = {5e-3, 2.5e-3};

struct NewtonianTerms {
  double boundary_term = 0.0;  // ∫_{∂Ω} ∂f/∂ν E(x-y) dσ
  double volume_term = 0.0;    // ∫_Ω Δf E(x-y) dx
};

NewtonianTerms newtonian_integrals(const ScalarField& f, const Domain& domain, const Point& y, int order);

// ε^{α+1-N} ∫_{∂B_ε(y)} (f(x) - f(y)) / |x-y|^α dσ(x), the sphere term whose
// vanishing as ε → 0 hypothesis (H) guarantees.
double holder_sphere_ratio(const ScalarField& f, const Point& y, double alpha, double eps, int order = 64);

}  // namespace layerpot
