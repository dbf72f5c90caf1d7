#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "layerpot/quadrature.hpp"

namespace layerpot {

inline constexpr int kMaxDim = 8;

// A point (or vector) in R^N with 2 <= N <= kMaxDim, stored inline.
class Point {
 public:
  Point() : Point(2) {}
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);
  static Point from(std::span<const double> coords);

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[i]; }
  double& operator[](int i) noexcept { return c_[i]; }
  std::span<const double> coords() const noexcept { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  double norm() const noexcept;
  double norm_squared() const noexcept;

  Point& operator+=(const Point& o) noexcept;
  Point& operator-=(const Point& o) noexcept;
  Point& operator*=(double s) noexcept;

  std::string to_string() const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 2;
};

Point operator+(Point a, const Point& b) noexcept;
Point operator-(Point a, const Point& b) noexcept;
Point operator-(Point a) noexcept;
Point operator*(Point a, double s) noexcept;
Point operator*(double s, Point a) noexcept;
double dot(const Point& a, const Point& b) noexcept;
double distance(const Point& a, const Point& b) noexcept;

// Throws Dimension when the two points live in different spaces.
void require_same_dim(const Point& a, const Point& b, const char* what);

class Ball {
 public:
  Ball(Point center, double radius);

  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int dim() const noexcept { return center_.dim(); }

  double volume() const;
  double surface_measure() const;

 private:
  Point center_;
  double radius_;
};

// Planar domain {c + s r(θ)(cos θ, sin θ) : 0 <= s < 1} with a positive
// trigonometric radial function
//   r(θ) = a0 + Σ_k (a_k cos kθ + b_k sin kθ),
// coefficients stored as {a0, a1, b1, a2, b2, ...}.
class StarShaped2D {
 public:
  StarShaped2D(Point center, std::vector<double> coefficients);

  const Point& center() const noexcept { return center_; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  double r(double theta) const noexcept;
  double dr(double theta) const noexcept;
  double d2r(double theta) const noexcept;

  Point boundary_point(double theta) const noexcept;
  // d/dθ of boundary_point.
  Point tangent(double theta) const noexcept;
  Point outward_normal(double theta) const noexcept;
  double curvature(double theta) const noexcept;

 private:
  Point center_;
  std::vector<double> coeffs_;
};

enum class LocationClass { Interior, Boundary, Exterior };

const char* to_string(LocationClass c) noexcept;

class Domain {
 public:
  Domain(Ball ball);                 // NOLINT(google-explicit-constructor)
  Domain(StarShaped2D star);         // NOLINT(google-explicit-constructor)

  static Domain unit_ball(int dim);

  int dim() const noexcept;
  bool is_ball() const noexcept { return std::holds_alternative<Ball>(shape_); }
  const Ball& ball() const;
  const StarShaped2D& star() const;

  // Reference point the domain is star-shaped about (ball or star center).
  const Point& center() const noexcept;
  double diameter() const noexcept;
  double volume() const;
  double surface_measure() const;

  // Membership tolerance is 1e-12 relative to the diameter.
  double boundary_tolerance() const noexcept { return 1e-12 * diameter(); }
  LocationClass classify(const Point& y) const;
  double distance_to_boundary(const Point& y) const;

  // Outward unit normal at a boundary point.
  Point normal_at(const Point& boundary_point) const;

  // Distance from `from` along unit direction `u` to the boundary. `from`
  // must lie in the closure and the domain must be star-shaped about it.
  double ray_exit(const Point& from, const Point& u) const;

  // True when every ray from `p` leaves the domain exactly once.
  bool is_star_shaped_about(const Point& p) const;

  std::string describe() const;

 private:
  std::variant<Ball, StarShaped2D> shape_;
  double diameter_ = 0.0;
  double surface_measure_ = 0.0;
  double volume_ = 0.0;
};

struct BoundaryQuadrature {
  std::vector<Point> nodes;
  std::vector<Point> normals;
  std::vector<double> weights;
  int order = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  double total_weight() const;
};

// Standard boundary rule: equispaced angles for planar curves, Gauss–Legendre
// in cos(polar angle) × equispaced azimuth for the sphere.
BoundaryQuadrature boundary_rule(const Domain& domain, int order);

// Boundary rule adapted to a target point. Planar rules start at the target's
// angle so a boundary target coincides with a node; sphere rules put the pole
// on the ray through the target, and for boundary targets use Gauss–Legendre
// in the polar angle itself so no node lands on the target. Other sphere
// targets within 2R of the surface get a polar angle split geometrically
// towards the pole.
BoundaryQuadrature boundary_rule_for_target(const Domain& domain, int order, const Point& target);

// Interior points y0 - d ν(y0).
std::vector<Point> closest_boundary_approach(const Domain& domain, const Point& y0,
                                             std::span<const double> distances);

// A point where a volume integrand may be singular, with the radial grading
// exponent used around it: ρ = r t^grading.
struct SingularCenter {
  Point at;
  int grading = 1;
};

// Radial grading that turns ρ^γ (γ > -1) into a smooth enough power of t.
// `with_log` requests extra grading for ρ^γ log ρ behaviour.
int grading_for_exponent(double gamma, bool with_log = false);

enum class VolumeMode { Regular, PolarCentered };

// A volume rule stored as a plan: per cell a centre, a set of directions with
// exit distances, and radial Gauss–Legendre segments. Nodes are generated on
// the fly so multi-million-node rules never materialise.
class VolumeQuadrature {
 public:
  struct Direction {
    Point u;
    double weight;  // angular weight (dθ or solid angle)
    double exit;    // distance to the cell boundary
  };
  struct Cell {
    Point center;
    double inner_radius = 0.0;  // > 0: split into B_r(center) and the remainder
    int grading = 1;
    int radial_nodes = 0;
    std::vector<Direction> directions;
  };

  VolumeMode mode() const noexcept { return mode_; }
  const std::optional<Point>& target() const noexcept { return target_; }
  int order() const noexcept { return order_; }
  int dim() const noexcept { return dim_; }
  std::span<const Cell> cells() const noexcept { return cells_; }

  std::size_t size() const noexcept;

  // visit(x, w)
  template <class Visit>
  void for_each(Visit&& visit) const;

  // visit(center, offset, w) with x = center + offset. Offsets from a
  // singular centre stay exact even where center + offset rounds to center.
  template <class Visit>
  void for_each_local(Visit&& visit) const;

  double integrate(const std::function<double(const Point&)>& g) const;
  double total_weight() const;

  struct Node {
    Point x;
    double weight;
  };
  std::vector<Node> materialize() const;

 private:
  friend class VolumeRuleBuilder;
  VolumeMode mode_ = VolumeMode::Regular;
  std::optional<Point> target_;
  int order_ = 0;
  int dim_ = 2;
  std::vector<Cell> cells_;
};

// Regular mode: one polar cell about the domain centre. PolarCentered mode:
// ball-split polar rule about `target` (interior, off the boundary).
VolumeQuadrature volume_rule(const Domain& domain, int order, VolumeMode mode,
                             const std::optional<Point>& target = std::nullopt);

// Rule with polar cells about each singular centre. Centres must be interior.
// With several centres the domain is split into nearest-centre cells.
VolumeQuadrature singular_volume_rule(const Domain& domain, int order,
                                      std::span<const SingularCenter> centers);

// ---------------------------------------------------------------------------

template <class Visit>
void VolumeQuadrature::for_each_local(Visit&& visit) const {
  for (const Cell& cell : cells_) {
    const GaussRule& gl = gauss_legendre_unit(cell.radial_nodes);
    const int n = static_cast<int>(gl.nodes.size());
    const int q = cell.grading;
    for (const Direction& d : cell.directions) {
      auto segment = [&](double r0, double r1, bool graded) {
        const double len = r1 - r0;
        for (int k = 0; k < n; ++k) {
          const double t = gl.nodes[k];
          double rho;
          double jac;
          if (graded && q > 1) {
            const double tq1 = std::pow(t, q - 1);
            rho = r0 + len * tq1 * t;
            jac = len * q * tq1;
          } else {
            rho = r0 + len * t;
            jac = len;
          }
          double rho_pow = 1.0;
          for (int i = 1; i < dim_; ++i) rho_pow *= rho;
          visit(cell.center, d.u * rho, d.weight * gl.weights[k] * jac * rho_pow);
        }
      };
      if (cell.inner_radius > 0.0) {
        segment(0.0, cell.inner_radius, true);
        segment(cell.inner_radius, d.exit, false);
      } else {
        segment(0.0, d.exit, true);
      }
    }
  }
}

template <class Visit>
void VolumeQuadrature::for_each(Visit&& visit) const {
  for_each_local([&](const Point& c, const Point& off, double w) { visit(c + off, w); });
}

}  // namespace layerpot
