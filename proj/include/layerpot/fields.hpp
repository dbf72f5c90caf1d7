#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layerpot/geometry.hpp"

namespace layerpot {

// Lebesgue exponent p ∈ [1, ∞]. p = 1 is admitted for the exterior identity,
// which holds for every p; the representation bounds require p > N at the call site.
class LebesgueExponent {
 public:
  explicit LebesgueExponent(double p);
  static LebesgueExponent infinity() { return LebesgueExponent(kInf); }

  bool is_infinite() const noexcept { return p_ == kInf; }
  double value() const noexcept { return p_; }
  // 1/p + 1/p' = 1; p' = 1 for p = ∞ and p' = ∞ for p = 1.
  double conjugate() const noexcept;

  std::string to_string() const;

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double p_;
};

// Throws Exponent unless p > dim.
void require_exponent_above_dimension(const LebesgueExponent& p, int dim);

// An immutable scalar field with exact gradient. Singular points form the
// finite family A; near each of them f - f(a) behaves like ρ^value_exponent
// and |∇f| like ρ^gradient_exponent.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Point(const Point&)>;
  using GradNormFn = std::function<std::optional<double>(const Domain&, const LebesgueExponent&)>;

  struct Spec {
    std::string name;
    ValueFn value;
    GradientFn gradient;
    ValueFn laplacian;  // empty when unavailable
    std::vector<Point> singular_points;
    double value_exponent = 1.0;
    double gradient_exponent = 0.0;
    std::optional<double> holder_exponent;
    GradNormFn grad_norm_closed_form;  // may be empty or return nullopt
    // Optional evaluation at base + offset without forming the sum, for
    // fields whose singular distance must survive rounding.
    std::function<double(const Point&, const Point&)> local_value;
    std::function<Point(const Point&, const Point&)> local_gradient;
    std::function<double(const Point&, const Point&)> local_laplacian;
    bool polynomial = false;           // smooth everywhere, no singular set
  };

  explicit ScalarField(Spec spec);

  const std::string& name() const noexcept { return data_->name; }
  double value(const Point& x) const { return data_->value(x); }
  double operator()(const Point& x) const { return data_->value(x); }
  // Singularity error at a point of A.
  Point gradient(const Point& x) const;
  bool has_laplacian() const noexcept { return static_cast<bool>(data_->laplacian); }
  // Capability error when no Laplacian is known.
  double laplacian(const Point& x) const;

  // Evaluation at base + offset; exact near a singular point used as base.
  double value_at(const Point& base, const Point& offset) const;
  Point gradient_at(const Point& base, const Point& offset) const;
  double laplacian_at(const Point& base, const Point& offset) const;

  std::span<const Point> singular_points() const noexcept { return data_->singular_points; }
  bool is_singular_at(const Point& x) const;
  double value_exponent() const noexcept { return data_->value_exponent; }
  double gradient_exponent() const noexcept { return data_->gradient_exponent; }
  std::optional<double> holder_exponent() const noexcept { return data_->holder_exponent; }
  bool is_polynomial() const noexcept { return data_->polynomial; }

  std::optional<double> closed_form_grad_norm(const Domain& domain, const LebesgueExponent& p) const;

  // s·f, keeping the singular structure.
  ScalarField scaled(double s, std::string name = {}) const;

 private:
  std::shared_ptr<const Spec> data_;
};

// Catalog lookup. Names and parameters (points are listed coordinate by
// coordinate; a single number c stands for the point (c, ..., c)):
//   constant(c)  linear(c, d1..dN)  coordinate(i)  (1-based index)
//   quadratic_radial(a)  harmonic_poly(k)  distance(y)  power_distance(y, β)
ScalarField catalog(std::string_view name, std::span<const double> params, int dim);

// Parses "name(p1, p2, ...)" and forwards to catalog.
ScalarField catalog_from_text(std::string_view text, int dim);

// sign·|x-y| for p = ∞, sign·|x-y|^{(p-N)/(p-1)} for N < p < ∞.
ScalarField extremal_field(const LebesgueExponent& p, const Point& y, int sign);

// ‖∇f‖_{L^p(Ω)}: the catalog's closed form when available, otherwise
// quadrature with polar cells about the singular points inside Ω.
double grad_norm(const ScalarField& f, const Domain& domain, const LebesgueExponent& p, int order = 128);

// Hypothesis (H) sampler: for each radius ε, the largest |f(x)-f(a)|/ε^α over
// `directions` points of the sphere of radius ε about a.
std::vector<double> holder_ratios(const ScalarField& f, const Point& a, double alpha,
                                  std::span<const double> radii, int directions = 64);

}  // namespace layerpot
