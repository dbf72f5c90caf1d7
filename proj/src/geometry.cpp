#include "layerpot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"

namespace layerpot {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_order(int order) {
  if (order < 4) fail(ErrorKind::Parameter, "quadrature order must be >= 4, got " + std::to_string(order));
}

void check_quadrature_dim(int dim) {
  if (dim != 2 && dim != 3) {
    fail(ErrorKind::Dimension, "quadrature is available for N = 2 and N = 3 only, got N = " + std::to_string(dim));
  }
}

// Orthonormal frame {e1, e2, e3} with e3 along `axis` (3-D only).
std::array<Point, 3> frame_along(const Point& axis) {
  Point e3 = axis * (1.0 / axis.norm());
  Point helper = std::abs(e3[0]) < 0.9 ? Point{1.0, 0.0, 0.0} : Point{0.0, 1.0, 0.0};
  Point e1 = helper - e3 * dot(helper, e3);
  e1 *= 1.0 / e1.norm();
  Point e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2], e3[0] * e1[1] - e3[1] * e1[0]};
  return {e1, e2, e3};
}

Point sphere_direction(const std::array<Point, 3>& f, double cos_phi, double sin_phi, double psi) {
  return f[0] * (sin_phi * std::cos(psi)) + f[1] * (sin_phi * std::sin(psi)) + f[2] * cos_phi;
}

double angle_of(const Point& v) { return std::atan2(v[1], v[0]); }

}  // namespace

// ---------------------------------------------------------------- Point

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::Dimension, "point dimension out of range: " + std::to_string(dim));
}

Point::Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
  if (dim_ < 1 || dim_ > kMaxDim) fail(ErrorKind::Dimension, "point dimension out of range: " + std::to_string(dim_));
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from(std::span<const double> coords) {
  Point p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

double Point::norm() const noexcept {
  double scale = 0.0;
  for (int i = 0; i < dim_; ++i) scale = std::max(scale, std::abs(c_[i]));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double v = c_[i] / scale;
    s += v * v;
  }
  return scale * std::sqrt(s);
}

double Point::norm_squared() const noexcept {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
  return s;
}

Point& Point::operator+=(const Point& o) noexcept {
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) noexcept {
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) noexcept {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < dim_; ++i) {
    if (i) os << ';';
    os << c_[i];
  }
  return os.str();
}

Point operator+(Point a, const Point& b) noexcept { return a += b; }
Point operator-(Point a, const Point& b) noexcept { return a -= b; }
Point operator-(Point a) noexcept { return a *= -1.0; }
Point operator*(Point a, double s) noexcept { return a *= s; }
Point operator*(double s, Point a) noexcept { return a *= s; }

double dot(const Point& a, const Point& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double distance(const Point& a, const Point& b) noexcept { return (a - b).norm(); }

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.dim() != b.dim()) {
    fail(ErrorKind::Dimension, std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                                   std::to_string(b.dim()) + ")");
  }
}

// ---------------------------------------------------------------- Ball

Ball::Ball(Point center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorKind::Parameter, "ball radius must be positive and finite");
  if (center.dim() < 2) fail(ErrorKind::Dimension, "ball needs dimension >= 2");
}

double Ball::volume() const { return sphere_area_constant(dim()) * std::pow(radius_, dim()) / dim(); }

double Ball::surface_measure() const { return sphere_area_constant(dim()) * std::pow(radius_, dim() - 1); }

// ---------------------------------------------------------------- StarShaped2D

StarShaped2D::StarShaped2D(Point center, std::vector<double> coefficients)
    : center_(center), coeffs_(std::move(coefficients)) {
  if (center.dim() != 2) fail(ErrorKind::Dimension, "star-shaped domains are planar");
  if (coeffs_.empty()) fail(ErrorKind::Parameter, "star-shaped domain needs at least the constant coefficient");
  if (coeffs_.size() % 2 == 0) coeffs_.push_back(0.0);
  for (double c : coeffs_) {
    if (!std::isfinite(c)) fail(ErrorKind::Parameter, "star-shaped domain coefficient is not finite");
  }
  constexpr int kSamples = 4096;
  for (int j = 0; j < kSamples; ++j) {
    if (!(r(kTwoPi * j / kSamples) > 0.0)) fail(ErrorKind::Parameter, "radial function must stay positive");
  }
}

double StarShaped2D::r(double theta) const noexcept {
  double v = coeffs_[0];
  const int modes = static_cast<int>(coeffs_.size() / 2);
  for (int k = 1; k <= modes; ++k) v += coeffs_[2 * k - 1] * std::cos(k * theta) + coeffs_[2 * k] * std::sin(k * theta);
  return v;
}

double StarShaped2D::dr(double theta) const noexcept {
  double v = 0.0;
  const int modes = static_cast<int>(coeffs_.size() / 2);
  for (int k = 1; k <= modes; ++k) v += k * (-coeffs_[2 * k - 1] * std::sin(k * theta) + coeffs_[2 * k] * std::cos(k * theta));
  return v;
}

double StarShaped2D::d2r(double theta) const noexcept {
  double v = 0.0;
  const int modes = static_cast<int>(coeffs_.size() / 2);
  for (int k = 1; k <= modes; ++k) {
    v -= k * k * (coeffs_[2 * k - 1] * std::cos(k * theta) + coeffs_[2 * k] * std::sin(k * theta));
  }
  return v;
}

Point StarShaped2D::boundary_point(double theta) const noexcept {
  const double rr = r(theta);
  return Point{center_[0] + rr * std::cos(theta), center_[1] + rr * std::sin(theta)};
}

Point StarShaped2D::tangent(double theta) const noexcept {
  const double rr = r(theta);
  const double d = dr(theta);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Point{d * c - rr * s, d * s + rr * c};
}

Point StarShaped2D::outward_normal(double theta) const noexcept {
  const Point t = tangent(theta);
  const double len = t.norm();
  return Point{t[1] / len, -t[0] / len};
}

double StarShaped2D::curvature(double theta) const noexcept {
  const double rr = r(theta);
  const double d = dr(theta);
  const double dd = d2r(theta);
  return (rr * rr + 2.0 * d * d - rr * dd) / std::pow(rr * rr + d * d, 1.5);
}

// ---------------------------------------------------------------- Domain

const char* to_string(LocationClass c) noexcept {
  switch (c) {
    case LocationClass::Interior: return "interior";
    case LocationClass::Boundary: return "boundary";
    case LocationClass::Exterior: return "exterior";
  }
  return "unknown";
}

Domain::Domain(Ball ball) : shape_(std::move(ball)) {
  const Ball& b = std::get<Ball>(shape_);
  diameter_ = 2.0 * b.radius();
  volume_ = b.volume();
  surface_measure_ = b.surface_measure();
}

Domain::Domain(StarShaped2D star) : shape_(std::move(star)) {
  const StarShaped2D& s = std::get<StarShaped2D>(shape_);
  // Trapezoid sums are spectrally accurate for the smooth periodic integrands.
  constexpr int kSamples = 4096;
  Accumulator area;
  Accumulator length;
  for (int j = 0; j < kSamples; ++j) {
    const double th = kTwoPi * j / kSamples;
    const double rr = s.r(th);
    const double d = s.dr(th);
    area.add(0.5 * rr * rr);
    length.add(std::sqrt(rr * rr + d * d));
  }
  volume_ = area.value() * kTwoPi / kSamples;
  surface_measure_ = length.value() * kTwoPi / kSamples;
  constexpr int kDiamSamples = 720;
  std::vector<Point> pts;
  pts.reserve(kDiamSamples);
  for (int j = 0; j < kDiamSamples; ++j) pts.push_back(s.boundary_point(kTwoPi * j / kDiamSamples));
  double diam = 0.0;
  for (int i = 0; i < kDiamSamples; ++i) {
    for (int j = i + 1; j < kDiamSamples; ++j) diam = std::max(diam, distance(pts[i], pts[j]));
  }
  diameter_ = diam;
}

Domain Domain::unit_ball(int dim) { return Domain(Ball(Point(dim), 1.0)); }

int Domain::dim() const noexcept { return is_ball() ? std::get<Ball>(shape_).dim() : 2; }

const Ball& Domain::ball() const {
  if (!is_ball()) fail(ErrorKind::Capability, "domain is not a ball");
  return std::get<Ball>(shape_);
}

const StarShaped2D& Domain::star() const {
  if (is_ball()) fail(ErrorKind::Capability, "domain is not a star-shaped curve domain");
  return std::get<StarShaped2D>(shape_);
}

const Point& Domain::center() const noexcept {
  return is_ball() ? std::get<Ball>(shape_).center() : std::get<StarShaped2D>(shape_).center();
}

double Domain::diameter() const noexcept { return diameter_; }
double Domain::volume() const { return volume_; }
double Domain::surface_measure() const { return surface_measure_; }

LocationClass Domain::classify(const Point& y) const {
  require_same_dim(y, center(), "classify");
  const double tol = boundary_tolerance();
  double gap;
  if (is_ball()) {
    gap = distance(y, ball().center()) - ball().radius();
  } else {
    const Point rel = y - star().center();
    const double rho = rel.norm();
    if (rho == 0.0) return LocationClass::Interior;
    gap = rho - star().r(angle_of(rel));
  }
  if (std::abs(gap) <= tol) return LocationClass::Boundary;
  return gap < 0.0 ? LocationClass::Interior : LocationClass::Exterior;
}

double Domain::distance_to_boundary(const Point& y) const {
  require_same_dim(y, center(), "distance_to_boundary");
  if (is_ball()) return std::abs(ball().radius() - distance(y, ball().center()));
  const StarShaped2D& s = star();
  constexpr int kSamples = 1024;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kSamples; ++j) {
    const double d = distance(s.boundary_point(kTwoPi * j / kSamples), y);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  // Golden-section refinement on the bracketing interval.
  const double h = kTwoPi / kSamples;
  double lo = kTwoPi * best / kSamples - h;
  double hi = lo + 2.0 * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = distance(s.boundary_point(x1), y);
  double f2 = distance(s.boundary_point(x2), y);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = distance(s.boundary_point(x1), y);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = distance(s.boundary_point(x2), y);
    }
  }
  return std::min({best_d, f1, f2});
}

Point Domain::normal_at(const Point& x) const {
  require_same_dim(x, center(), "normal_at");
  if (is_ball()) {
    const Point rel = x - ball().center();
    return rel * (1.0 / rel.norm());
  }
  return star().outward_normal(angle_of(x - star().center()));
}

double Domain::ray_exit(const Point& from, const Point& u) const {
  if (is_ball()) {
    const Point w = from - ball().center();
    const double b = dot(w, u);
    const double c = w.norm_squared() - ball().radius() * ball().radius();
    const double disc = std::max(0.0, b * b - c);
    // Stable root of ρ² + 2bρ + c = 0 with ρ > 0.
    const double sq = std::sqrt(disc);
    if (b > 0.0) return (c < 0.0) ? -c / (b + sq) : 0.0;
    return -b + sq;
  }
  // Star: find θ with b(θ) - from parallel to u. The crossing is unique when
  // the domain is star-shaped about `from`.
  const StarShaped2D& s = star();
  auto cross = [&](double th) {
    const Point v = s.boundary_point(th) - from;
    return u[0] * v[1] - u[1] * v[0];
  };
  constexpr int kSamples = 256;
  double prev_th = 0.0;
  double prev = cross(prev_th);
  for (int j = 1; j <= kSamples; ++j) {
    const double th = kTwoPi * j / kSamples;
    const double cur = cross(th);
    if ((prev <= 0.0 && cur > 0.0) || (prev < 0.0 && cur >= 0.0)) {
      double lo = prev_th;
      double hi = th;
      for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cross(mid) <= 0.0) lo = mid; else hi = mid;
      }
      const Point v = s.boundary_point(0.5 * (lo + hi)) - from;
      if (dot(v, u) > 0.0) return v.norm();
    }
    prev = cur;
    prev_th = th;
  }
  fail(ErrorKind::Capability, "ray from the given point does not leave the star-shaped domain cleanly");
}

bool Domain::is_star_shaped_about(const Point& p) const {
  if (classify(p) != LocationClass::Interior) return false;
  if (is_ball()) return true;
  const StarShaped2D& s = star();
  constexpr int kSamples = 2048;
  for (int j = 0; j < kSamples; ++j) {
    const double th = kTwoPi * j / kSamples;
    if (!(dot(s.boundary_point(th) - p, s.outward_normal(th)) > 0.0)) return false;
  }
  return true;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (is_ball()) {
    os << "ball(center=" << ball().center().to_string() << ",R=" << ball().radius() << ")";
  } else {
    os << "star(center=" << star().center().to_string() << ",coeffs=";
    bool first = true;
    for (double c : star().coefficients()) {
      if (!first) os << ';';
      os << c;
      first = false;
    }
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------- boundary rules

double BoundaryQuadrature::total_weight() const {
  Accumulator acc;
  for (double w : weights) acc.add(w);
  return acc.value();
}

namespace {

BoundaryQuadrature planar_rule(const Domain& domain, int order, double start) {
  BoundaryQuadrature q;
  q.order = order;
  q.nodes.reserve(order);
  q.normals.reserve(order);
  q.weights.reserve(order);
  const double h = kTwoPi / order;
  for (int j = 0; j < order; ++j) {
    const double th = start + h * j;
    if (domain.is_ball()) {
      const Ball& b = domain.ball();
      const Point n{std::cos(th), std::sin(th)};
      q.nodes.push_back(b.center() + n * b.radius());
      q.normals.push_back(n);
      q.weights.push_back(h * b.radius());
    } else {
      const StarShaped2D& s = domain.star();
      q.nodes.push_back(s.boundary_point(th));
      q.normals.push_back(s.outward_normal(th));
      q.weights.push_back(h * s.tangent(th).norm());
    }
  }
  return q;
}

// Sphere rule with pole `axis`. When `polar_angle_gauss` the Gauss–Legendre
// variable is the polar angle φ (weight sin φ), otherwise cos φ.
BoundaryQuadrature sphere_rule(const Ball& ball, int order, const Point& axis, bool polar_angle_gauss) {
  const int n_az = order;
  const int n_pol = std::max(2, order / 2);
  const auto f = frame_along(axis);
  const GaussRule& gl = gauss_legendre(n_pol);
  const double R = ball.radius();
  BoundaryQuadrature q;
  q.order = order;
  const std::size_t total = static_cast<std::size_t>(n_az) * n_pol;
  q.nodes.reserve(total);
  q.normals.reserve(total);
  q.weights.reserve(total);
  for (int i = 0; i < n_pol; ++i) {
    double c;
    double s;
    double w;
    if (polar_angle_gauss) {
      const double phi = 0.5 * kPi * (gl.nodes[i] + 1.0);
      c = std::cos(phi);
      s = std::sin(phi);
      w = 0.5 * kPi * gl.weights[i] * s;
    } else {
      c = gl.nodes[i];
      s = std::sqrt(std::max(0.0, 1.0 - c * c));
      w = gl.weights[i];
    }
    for (int k = 0; k < n_az; ++k) {
      const Point n = sphere_direction(f, c, s, kTwoPi * k / n_az);
      q.nodes.push_back(ball.center() + n * R);
      q.normals.push_back(n);
      q.weights.push_back(R * R * w * kTwoPi / n_az);
    }
  }
  return q;
}

}  // namespace

BoundaryQuadrature boundary_rule(const Domain& domain, int order) {
  check_order(order);
  check_quadrature_dim(domain.dim());
  if (domain.dim() == 2) return planar_rule(domain, order, 0.0);
  return sphere_rule(domain.ball(), order, Point{0.0, 0.0, 1.0}, false);
}

BoundaryQuadrature boundary_rule_for_target(const Domain& domain, int order, const Point& target) {
  check_order(order);
  check_quadrature_dim(domain.dim());
  require_same_dim(target, domain.center(), "boundary_rule_for_target");
  const Point rel = target - domain.center();
  const bool on_boundary = domain.classify(target) == LocationClass::Boundary;
  if (domain.dim() == 2) {
    const double start = rel.norm() > 0.0 ? angle_of(rel) : 0.0;
    return planar_rule(domain, order, start);
  }
  const Point axis = rel.norm() > 1e-14 * domain.diameter() ? rel : Point{0.0, 0.0, 1.0};
  const Ball& ball = domain.ball();
  const double gap = std::abs(rel.norm() - ball.radius()) / ball.radius();
  if (on_boundary || gap >= 2.0) return sphere_rule(ball, order, axis, on_boundary);
  // Near the surface the kernel has complex poles at φ ≈ ±i·gap, so the polar
  // angle is split geometrically: [0, gap], [gap, 2 gap], ... up to π.
  std::vector<double> breaks{0.0};
  for (double b = gap; b < kPi; b *= 2.0) breaks.push_back(b);
  if (kPi - breaks.back() < 0.5 * (breaks.back() - breaks[breaks.size() - 2])) breaks.back() = kPi;
  else breaks.push_back(kPi);
  const int m = std::max(12, order / 4);
  const int n_az = order;
  const auto f = frame_along(axis);
  const GaussRule& gl = gauss_legendre(m);
  const double R = ball.radius();
  BoundaryQuadrature q;
  q.order = order;
  for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
    const double a = breaks[piece];
    const double len = breaks[piece + 1] - a;
    for (int i = 0; i < m; ++i) {
      const double phi = a + 0.5 * len * (gl.nodes[i] + 1.0);
      const double w = 0.5 * len * gl.weights[i] * std::sin(phi);
      for (int k = 0; k < n_az; ++k) {
        const Point n = sphere_direction(f, std::cos(phi), std::sin(phi), kTwoPi * k / n_az);
        q.nodes.push_back(ball.center() + n * R);
        q.normals.push_back(n);
        q.weights.push_back(R * R * w * kTwoPi / n_az);
      }
    }
  }
  return q;
}

std::vector<Point> closest_boundary_approach(const Domain& domain, const Point& y0,
                                             std::span<const double> distances) {
  if (domain.classify(y0) != LocationClass::Boundary) {
    fail(ErrorKind::Placement, "closest_boundary_approach: base point " + y0.to_string() + " is not on the boundary");
  }
  const Point nu = domain.normal_at(y0);
  std::vector<Point> out;
  out.reserve(distances.size());
  for (double d : distances) {
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorKind::Range, "closest_boundary_approach: distances must be positive");
    const Point p = y0 - nu * d;
    if (domain.classify(p) != LocationClass::Interior) {
      fail(ErrorKind::Range, "closest_boundary_approach: distance " + std::to_string(d) + " leaves the domain");
    }
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------- volume rules

int grading_for_exponent(double gamma, bool with_log) {
  if (!(gamma > -1.0)) fail(ErrorKind::Integrability, "radial exponent " + std::to_string(gamma) + " is not integrable");
  const bool integer = gamma >= 0.0 && std::abs(gamma - std::round(gamma)) < 1e-12;
  if (integer && !with_log) return 1;
  const double target = with_log ? 6.0 : 5.0;
  const int q = static_cast<int>(std::ceil(target / (gamma + 1.0) - 1e-12));
  return std::clamp(q, with_log ? 2 : 1, 40);
}

std::size_t VolumeQuadrature::size() const noexcept {
  std::size_t n = 0;
  for (const Cell& c : cells_) {
    n += c.directions.size() * static_cast<std::size_t>(c.radial_nodes) * (c.inner_radius > 0.0 ? 2u : 1u);
  }
  return n;
}

double VolumeQuadrature::integrate(const std::function<double(const Point&)>& g) const {
  Accumulator acc;
  for_each([&](const Point& x, double w) { acc.add(w * g(x)); });
  return acc.value();
}

double VolumeQuadrature::total_weight() const {
  Accumulator acc;
  for_each([&](const Point&, double w) { acc.add(w); });
  return acc.value();
}

std::vector<VolumeQuadrature::Node> VolumeQuadrature::materialize() const {
  std::vector<Node> out;
  out.reserve(size());
  for_each([&](const Point& x, double w) { out.push_back({x, w}); });
  return out;
}

class VolumeRuleBuilder {
 public:
  VolumeRuleBuilder(const Domain& domain, int order) : domain_(domain), order_(order) {
    check_order(order);
    check_quadrature_dim(domain.dim());
  }

  VolumeQuadrature regular() const {
    VolumeQuadrature q;
    q.mode_ = VolumeMode::Regular;
    q.order_ = order_;
    q.dim_ = domain_.dim();
    VolumeQuadrature::Cell cell;
    cell.center = domain_.center();
    cell.radial_nodes = std::max(2, order_ / 2);
    if (domain_.dim() == 2) {
      add_planar_directions(cell, order_, {});
    } else {
      add_sphere_directions(cell, order_, Point{0.0, 0.0, 1.0});
    }
    q.cells_.push_back(std::move(cell));
    return q;
  }

  VolumeQuadrature singular(std::span<const SingularCenter> input) const {
    std::vector<SingularCenter> centers;
    const double tol = 1e-12 * domain_.diameter();
    for (const SingularCenter& c : input) {
      require_same_dim(c.at, domain_.center(), "singular_volume_rule");
      const LocationClass loc = domain_.classify(c.at);
      if (loc == LocationClass::Boundary) {
        fail(ErrorKind::Placement, "singular centre " + c.at.to_string() + " lies on the boundary");
      }
      if (loc == LocationClass::Exterior) {
        fail(ErrorKind::Domain, "singular centre " + c.at.to_string() + " lies outside the domain");
      }
      auto same = std::find_if(centers.begin(), centers.end(),
                               [&](const SingularCenter& o) { return distance(o.at, c.at) <= tol; });
      if (same != centers.end()) {
        same->grading = std::max(same->grading, c.grading);
      } else {
        centers.push_back(c);
      }
    }
    if (centers.empty()) return regular();
    if (centers.size() > 16) fail(ErrorKind::Capability, "at most 16 singular centres are supported");
    if (domain_.dim() == 3 && centers.size() > 2) {
      fail(ErrorKind::Capability, "3-D rules support at most two singular centres");
    }
    for (const SingularCenter& c : centers) {
      if (!domain_.is_star_shaped_about(c.at)) {
        fail(ErrorKind::Capability, "domain is not star-shaped about singular centre " + c.at.to_string());
      }
    }

    VolumeQuadrature q;
    q.mode_ = VolumeMode::PolarCentered;
    q.order_ = order_;
    q.dim_ = domain_.dim();
    std::size_t planned = 0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      std::vector<Point> others;
      double separation = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < centers.size(); ++j) {
        if (j == i) continue;
        others.push_back(centers[j].at);
        separation = std::min(separation, distance(centers[i].at, centers[j].at));
      }
      const double d = domain_.distance_to_boundary(centers[i].at);
      VolumeQuadrature::Cell cell;
      cell.center = centers[i].at;
      cell.grading = centers[i].grading;
      cell.inner_radius = 0.5 * std::min(d, 0.5 * separation);
      cell.radial_nodes = std::max(2, order_ / 2);
      int n = order_;
      if (domain_.dim() == 2) {
        while (kTwoPi * domain_.diameter() / n > d && n < kMaxEscalatedOrder) n *= 2;
      }
      const std::size_t per_dir = static_cast<std::size_t>(cell.radial_nodes) * 2;
      const std::size_t dirs = domain_.dim() == 2 ? static_cast<std::size_t>(n + 128)
                                                  : static_cast<std::size_t>(n) * n;
      planned += dirs * per_dir;
      if (planned > node_budget()) {
        fail(ErrorKind::Budget, "volume rule needs about " + std::to_string(planned) + " nodes, budget is " +
                                    std::to_string(node_budget()) + " (lower the order or raise LAYERPOT_MAX_NODES)");
      }
      if (domain_.dim() == 2) {
        add_planar_directions(cell, n, others);
      } else if (others.empty()) {
        const Point rel = cell.center - domain_.center();
        add_sphere_directions(cell, n, rel.norm() > tol ? rel : Point{0.0, 0.0, 1.0});
      } else {
        add_split_sphere_directions(cell, n, others.front());
      }
      q.cells_.push_back(std::move(cell));
    }
    return q;
  }

  static void set_target(VolumeQuadrature& q, const Point& t) { q.target_ = t; }

 private:
  // Exit distance along u from `c`, limited by the bisector planes towards
  // the other centres. Returns the index of the active piece (0 = domain).
  std::pair<double, int> exit_with_index(const Point& c, const Point& u, std::span<const Point> others) const {
    double best = domain_.ray_exit(c, u);
    int idx = 0;
    for (std::size_t j = 0; j < others.size(); ++j) {
      const Point e = others[j] - c;
      const double sep = e.norm();
      const double cosang = dot(u, e) / sep;
      if (cosang <= 0.0) continue;
      const double t = 0.5 * sep / cosang;
      if (t < best) {
        best = t;
        idx = static_cast<int>(j) + 1;
      }
    }
    return {best, idx};
  }

  void add_planar_directions(VolumeQuadrature::Cell& cell, int n, std::span<const Point> others) const {
    auto dir = [](double th) { return Point{std::cos(th), std::sin(th)}; };
    if (others.empty()) {
      cell.directions.reserve(n);
      for (int j = 0; j < n; ++j) {
        const Point u = dir(kTwoPi * j / n);
        cell.directions.push_back({u, kTwoPi / n, domain_.ray_exit(cell.center, u)});
      }
      return;
    }
    // Locate the angles where the active boundary piece switches; the exit
    // distance is smooth between them, so each arc gets its own Gauss rule.
    const int samples = std::max(1024, 4 * n);
    std::vector<int> active(samples);
    for (int j = 0; j < samples; ++j) active[j] = exit_with_index(cell.center, dir(kTwoPi * j / samples), others).second;
    std::vector<double> breaks;
    for (int j = 0; j < samples; ++j) {
      const int next = (j + 1) % samples;
      if (active[j] == active[next]) continue;
      double lo = kTwoPi * j / samples;
      double hi = kTwoPi * (j + 1) / samples;
      const int a = active[j];
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (exit_with_index(cell.center, dir(mid), others).second == a) lo = mid; else hi = mid;
      }
      breaks.push_back(0.5 * (lo + hi));
    }
    if (breaks.empty()) {
      for (int j = 0; j < n; ++j) {
        const Point u = dir(kTwoPi * j / n);
        cell.directions.push_back({u, kTwoPi / n, exit_with_index(cell.center, u, others).first});
      }
      return;
    }
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t k = 0; k < breaks.size(); ++k) {
      const double a = breaks[k];
      const double b = (k + 1 < breaks.size()) ? breaks[k + 1] : breaks.front() + kTwoPi;
      const double len = b - a;
      const int m = std::max(8, static_cast<int>(std::ceil(n * len / kTwoPi)));
      const GaussRule& gl = gauss_legendre(m);
      for (int i = 0; i < m; ++i) {
        const double th = a + 0.5 * len * (gl.nodes[i] + 1.0);
        const Point u = dir(th);
        cell.directions.push_back({u, 0.5 * len * gl.weights[i], exit_with_index(cell.center, u, others).first});
      }
    }
  }

  void add_sphere_directions(VolumeQuadrature::Cell& cell, int n, const Point& axis) const {
    const auto f = frame_along(axis);
    const int n_pol = std::max(2, n / 2);
    const GaussRule& gl = gauss_legendre(n_pol);
    cell.directions.reserve(static_cast<std::size_t>(n) * n_pol);
    for (int i = 0; i < n_pol; ++i) {
      const double c = gl.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int k = 0; k < n; ++k) {
        const Point u = sphere_direction(f, c, s, kTwoPi * k / n);
        cell.directions.push_back({u, gl.weights[i] * kTwoPi / n, domain_.ray_exit(cell.center, u)});
      }
    }
  }

  // Ball cell cut by the bisector plane towards `other`. With the pole along
  // the plane normal, the directions hitting the flat face form a cap
  // 0 <= φ < φ*(ψ) whose rim follows from the disk where plane meets sphere.
  void add_split_sphere_directions(VolumeQuadrature::Cell& cell, int n, const Point& other) const {
    const Ball& ball = domain_.ball();
    const Point axis = other - cell.center;
    const double h = 0.5 * axis.norm();
    const auto f = frame_along(axis);
    const Point foot = cell.center + f[2] * h;
    const double offset = dot(foot - ball.center(), f[2]);
    const Point disk_center = ball.center() + f[2] * offset;
    const double disk_radius = std::sqrt(std::max(0.0, ball.radius() * ball.radius() - offset * offset));
    const Point w = foot - disk_center;
    const int n_pol = std::max(2, n / 2);
    const GaussRule& gl = gauss_legendre(n_pol);
    cell.directions.reserve(static_cast<std::size_t>(n) * 2 * n_pol);
    for (int k = 0; k < n; ++k) {
      const double psi = kTwoPi * k / n;
      const Point v = f[0] * std::cos(psi) + f[1] * std::sin(psi);
      const double b = dot(w, v);
      const double rho_disk = -b + std::sqrt(std::max(0.0, b * b + disk_radius * disk_radius - w.norm_squared()));
      const double phi_star = std::atan2(rho_disk, h);
      auto piece = [&](double a, double bnd, bool flat) {
        const double len = bnd - a;
        for (int i = 0; i < n_pol; ++i) {
          const double phi = a + 0.5 * len * (gl.nodes[i] + 1.0);
          const double c = std::cos(phi);
          const double s = std::sin(phi);
          const Point u = sphere_direction(f, c, s, psi);
          const double exit = flat ? h / c : domain_.ray_exit(cell.center, u);
          cell.directions.push_back({u, 0.5 * len * gl.weights[i] * s * kTwoPi / n, exit});
        }
      };
      piece(0.0, phi_star, true);
      piece(phi_star, kPi, false);
    }
  }

  const Domain& domain_;
  int order_;
};

VolumeQuadrature volume_rule(const Domain& domain, int order, VolumeMode mode, const std::optional<Point>& target) {
  VolumeRuleBuilder builder(domain, order);
  if (mode == VolumeMode::Regular) return builder.regular();
  if (!target) fail(ErrorKind::Parameter, "polar-centered volume rule needs a target point");
  require_same_dim(*target, domain.center(), "volume_rule");
  const LocationClass loc = domain.classify(*target);
  if (loc == LocationClass::Boundary) {
    fail(ErrorKind::Placement, "polar-centered target " + target->to_string() + " lies on the boundary");
  }
  if (loc == LocationClass::Exterior) {
    fail(ErrorKind::Domain, "polar-centered target " + target->to_string() + " lies outside the domain");
  }
  const SingularCenter c{*target, 1};
  VolumeQuadrature q = builder.singular(std::span<const SingularCenter>(&c, 1));
  VolumeRuleBuilder::set_target(q, *target);
  return q;
}

VolumeQuadrature singular_volume_rule(const Domain& domain, int order, std::span<const SingularCenter> centers) {
  return VolumeRuleBuilder(domain, order).singular(centers);
}

}  // namespace layerpot
