#include "layerpot/fields.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"

namespace layerpot {

namespace {

constexpr std::size_t kMaxSingularPoints = 16;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string format_args(std::span<const double> params) {
  std::string s;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ',';
    s += format_number(params[i]);
  }
  return s;
}

Point point_param(std::span<const double> params, int dim, const char* what) {
  if (params.size() == 1) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = params[0];
    return p;
  }
  if (static_cast<int>(params.size()) != dim) {
    fail(ErrorKind::Parameter, std::string(what) + ": expected 1 or " + std::to_string(dim) +
                                   " coordinates, got " + std::to_string(params.size()));
  }
  return Point::from(params);
}

void expect_count(std::span<const double> params, std::size_t n, const char* what) {
  if (params.size() != n) {
    fail(ErrorKind::Parameter, std::string(what) + ": expected " + std::to_string(n) + " parameter(s), got " +
                                   std::to_string(params.size()));
  }
}

// ‖c‖_{L^p(Ω)} for a constant c ≥ 0.
double constant_norm(double c, const Domain& d, const LebesgueExponent& p) {
  if (p.is_infinite()) return c;
  return c * std::pow(d.volume(), 1.0 / p.value());
}

bool ball_centered_at(const Domain& d, const Point& a) {
  return d.is_ball() && a.dim() == d.dim() && distance(d.ball().center(), a) <= d.boundary_tolerance();
}

// ‖c ρ^g‖_{L^p(B_R(a))} with ρ = |x-a|.
double radial_power_norm(double c, double g, int dim, double R, const LebesgueExponent& p) {
  if (p.is_infinite()) {
    if (g < 0.0) fail(ErrorKind::Integrability, "gradient is unbounded near its singular point");
    return c * std::pow(R, g);
  }
  const double e = g * p.value() + dim;
  if (!(e > 0.0)) fail(ErrorKind::Integrability, "gradient is not p-integrable for p = " + p.to_string());
  return c * std::pow(sphere_area_constant(dim) * std::pow(R, e) / e, 1.0 / p.value());
}

ScalarField make_distance(const Point& y, double beta, std::string name) {
  ScalarField::Spec s;
  s.name = std::move(name);
  s.singular_points = {y};
  s.value_exponent = beta;
  s.gradient_exponent = beta - 1.0;
  if (beta > 0.0 && beta < 1.0) s.holder_exponent = beta;
  const bool unit = beta == 1.0;
  s.value = [y, beta, unit](const Point& x) {
    require_same_dim(x, y, "distance field");
    const double r = distance(x, y);
    return unit ? r : std::pow(r, beta);
  };
  s.gradient = [y, beta, unit](const Point& x) {
    const Point d = x - y;
    const double r = d.norm();
    return unit ? d * (1.0 / r) : d * (beta * std::pow(r, beta - 2.0));
  };
  s.laplacian = [y, beta](const Point& x) {
    const double r = distance(x, y);
    if (r == 0.0) fail(ErrorKind::Singularity, "Laplacian evaluated at the singular point");
    return beta * (beta + x.dim() - 2.0) * std::pow(r, beta - 2.0);
  };
  s.local_value = [y, beta, unit](const Point& base, const Point& off) {
    const double r = ((base - y) + off).norm();
    return unit ? r : std::pow(r, beta);
  };
  s.local_gradient = [y, beta, unit](const Point& base, const Point& off) {
    const Point d = (base - y) + off;
    const double r = d.norm();
    if (r == 0.0) fail(ErrorKind::Singularity, "gradient requested at the singular point");
    return unit ? d * (1.0 / r) : d * (beta * std::pow(r, beta - 2.0));
  };
  s.local_laplacian = [y, beta](const Point& base, const Point& off) {
    const double r = ((base - y) + off).norm();
    if (r == 0.0) fail(ErrorKind::Singularity, "Laplacian evaluated at the singular point");
    return beta * (beta + base.dim() - 2.0) * std::pow(r, beta - 2.0);
  };
  s.grad_norm_closed_form = [y, beta, unit](const Domain& d, const LebesgueExponent& p) -> std::optional<double> {
    if (unit) return constant_norm(1.0, d, p);
    if (ball_centered_at(d, y)) return radial_power_norm(std::abs(beta), beta - 1.0, d.dim(), d.ball().radius(), p);
    return std::nullopt;
  };
  return ScalarField(std::move(s));
}

}  // namespace

// ---------------------------------------------------------------- exponent

LebesgueExponent::LebesgueExponent(double p) : p_(p) {
  if (std::isnan(p) || p < 1.0) fail(ErrorKind::Exponent, "Lebesgue exponent must lie in [1, inf], got " + format_number(p));
}

double LebesgueExponent::conjugate() const noexcept {
  if (is_infinite()) return 1.0;
  if (p_ == 1.0) return kInf;
  return p_ / (p_ - 1.0);
}

std::string LebesgueExponent::to_string() const { return is_infinite() ? "inf" : format_number(p_); }

void require_exponent_above_dimension(const LebesgueExponent& p, int dim) {
  if (!(p.value() > dim)) {
    fail(ErrorKind::Exponent, "need p > N (p = " + p.to_string() + ", N = " + std::to_string(dim) + ")");
  }
}

// ---------------------------------------------------------------- field

ScalarField::ScalarField(Spec spec) {
  if (!spec.value || !spec.gradient) fail(ErrorKind::Parameter, "field needs a value and a gradient");
  if (spec.singular_points.size() > kMaxSingularPoints) {
    fail(ErrorKind::Parameter, "at most 16 singular points are supported");
  }
  data_ = std::make_shared<const Spec>(std::move(spec));
}

bool ScalarField::is_singular_at(const Point& x) const {
  for (const Point& a : data_->singular_points) {
    if (a.dim() == x.dim() && distance(a, x) == 0.0) return true;
  }
  return false;
}

double ScalarField::value_at(const Point& base, const Point& offset) const {
  return data_->local_value ? data_->local_value(base, offset) : data_->value(base + offset);
}

Point ScalarField::gradient_at(const Point& base, const Point& offset) const {
  return data_->local_gradient ? data_->local_gradient(base, offset) : gradient(base + offset);
}

double ScalarField::laplacian_at(const Point& base, const Point& offset) const {
  if (!data_->laplacian) fail(ErrorKind::Capability, name() + " has no Laplacian");
  return data_->local_laplacian ? data_->local_laplacian(base, offset) : laplacian(base + offset);
}

Point ScalarField::gradient(const Point& x) const {
  if (is_singular_at(x)) fail(ErrorKind::Singularity, name() + ": gradient requested at singular point " + x.to_string());
  return data_->gradient(x);
}

double ScalarField::laplacian(const Point& x) const {
  if (!data_->laplacian) fail(ErrorKind::Capability, name() + " has no Laplacian");
  if (is_singular_at(x)) fail(ErrorKind::Singularity, name() + ": Laplacian requested at singular point " + x.to_string());
  return data_->laplacian(x);
}

std::optional<double> ScalarField::closed_form_grad_norm(const Domain& domain, const LebesgueExponent& p) const {
  if (!data_->grad_norm_closed_form) return std::nullopt;
  return data_->grad_norm_closed_form(domain, p);
}

ScalarField ScalarField::scaled(double s, std::string name) const {
  Spec spec = *data_;
  spec.name = name.empty() ? format_number(s) + "*" + data_->name : std::move(name);
  auto base = data_;
  spec.value = [base, s](const Point& x) { return s * base->value(x); };
  spec.gradient = [base, s](const Point& x) { return base->gradient(x) * s; };
  if (base->laplacian) spec.laplacian = [base, s](const Point& x) { return s * base->laplacian(x); };
  if (base->local_value) {
    spec.local_value = [base, s](const Point& b, const Point& o) { return s * base->local_value(b, o); };
  }
  if (base->local_gradient) {
    spec.local_gradient = [base, s](const Point& b, const Point& o) { return base->local_gradient(b, o) * s; };
  }
  if (base->local_laplacian) {
    spec.local_laplacian = [base, s](const Point& b, const Point& o) { return s * base->local_laplacian(b, o); };
  }
  if (base->grad_norm_closed_form) {
    spec.grad_norm_closed_form = [base, s](const Domain& d, const LebesgueExponent& p) -> std::optional<double> {
      auto v = base->grad_norm_closed_form(d, p);
      if (v) *v *= std::abs(s);
      return v;
    };
  }
  return ScalarField(std::move(spec));
}

// ---------------------------------------------------------------- catalog

ScalarField catalog(std::string_view name, std::span<const double> params, int dim) {
  if (dim < 2 || dim > kMaxDim) fail(ErrorKind::Dimension, "field dimension out of range: " + std::to_string(dim));
  for (double v : params) {
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, std::string(name) + ": parameters must be finite");
  }
  const std::string label = std::string(name) + "(" + format_args(params) + ")";
  ScalarField::Spec s;
  s.name = label;
  s.polynomial = true;

  if (name == "constant") {
    expect_count(params, 1, "constant");
    const double c = params[0];
    s.value = [c](const Point&) { return c; };
    s.gradient = [](const Point& x) { return Point(x.dim()); };
    s.laplacian = [](const Point&) { return 0.0; };
    s.grad_norm_closed_form = [](const Domain&, const LebesgueExponent&) -> std::optional<double> { return 0.0; };
    return ScalarField(std::move(s));
  }
  if (name == "linear") {
    expect_count(params, static_cast<std::size_t>(dim) + 1, "linear");
    const double c = params[0];
    const Point d = Point::from(params.subspan(1));
    s.value = [c, d](const Point& x) {
      require_same_dim(x, d, "linear field");
      return c + dot(d, x);
    };
    s.gradient = [d](const Point&) { return d; };
    s.laplacian = [](const Point&) { return 0.0; };
    s.grad_norm_closed_form = [d](const Domain& dom, const LebesgueExponent& p) -> std::optional<double> {
      return constant_norm(d.norm(), dom, p);
    };
    return ScalarField(std::move(s));
  }
  if (name == "coordinate") {
    expect_count(params, 1, "coordinate");
    const double raw = params[0];
    if (raw != std::floor(raw) || raw < 1.0 || raw > dim) {
      fail(ErrorKind::Parameter, "coordinate: index must be an integer in 1.." + std::to_string(dim));
    }
    const int i = static_cast<int>(raw) - 1;
    s.value = [i](const Point& x) { return x[i]; };
    s.gradient = [i](const Point& x) {
      Point g(x.dim());
      g[i] = 1.0;
      return g;
    };
    s.laplacian = [](const Point&) { return 0.0; };
    s.grad_norm_closed_form = [](const Domain& dom, const LebesgueExponent& p) -> std::optional<double> {
      return constant_norm(1.0, dom, p);
    };
    return ScalarField(std::move(s));
  }
  if (name == "quadratic_radial") {
    const Point a = point_param(params, dim, "quadratic_radial");
    s.value = [a](const Point& x) { return (x - a).norm_squared(); };
    s.gradient = [a](const Point& x) { return (x - a) * 2.0; };
    s.laplacian = [](const Point& x) { return 2.0 * x.dim(); };
    s.grad_norm_closed_form = [a](const Domain& dom, const LebesgueExponent& p) -> std::optional<double> {
      if (dom.is_ball() && p.is_infinite()) return 2.0 * (distance(a, dom.ball().center()) + dom.ball().radius());
      if (ball_centered_at(dom, a)) return radial_power_norm(2.0, 1.0, dom.dim(), dom.ball().radius(), p);
      return std::nullopt;
    };
    return ScalarField(std::move(s));
  }
  if (name == "harmonic_poly") {
    expect_count(params, 1, "harmonic_poly");
    const double raw = params[0];
    if (raw != std::floor(raw) || raw < 1.0 || raw > 64.0) {
      fail(ErrorKind::Parameter, "harmonic_poly: degree must be an integer in 1..64");
    }
    const int k = static_cast<int>(raw);
    // Re (x1 + i x2)^k and k (x1 + i x2)^{k-1}, by repeated multiplication.
    auto power = [](double re, double im, int n) {
      double pr = 1.0;
      double pi = 0.0;
      for (int j = 0; j < n; ++j) {
        const double t = pr * re - pi * im;
        pi = pr * im + pi * re;
        pr = t;
      }
      return std::pair{pr, pi};
    };
    s.value = [k, power](const Point& x) { return power(x[0], x[1], k).first; };
    s.gradient = [k, power](const Point& x) {
      const auto [re, im] = power(x[0], x[1], k - 1);
      Point g(x.dim());
      g[0] = k * re;
      g[1] = -k * im;
      return g;
    };
    s.laplacian = [](const Point&) { return 0.0; };
    return ScalarField(std::move(s));
  }
  if (name == "distance") {
    return make_distance(point_param(params, dim, "distance"), 1.0, label);
  }
  if (name == "power_distance") {
    if (params.size() < 2) fail(ErrorKind::Parameter, "power_distance: expected centre coordinates and an exponent");
    const double beta = params.back();
    if (!(beta > 0.0)) fail(ErrorKind::Parameter, "power_distance: exponent must be positive, got " + format_number(beta));
    return make_distance(point_param(params.first(params.size() - 1), dim, "power_distance"), beta, label);
  }
  fail(ErrorKind::Catalog, "unknown field '" + std::string(name) + "'");
}

ScalarField catalog_from_text(std::string_view text, int dim) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    fail(ErrorKind::Parameter, "field spec '" + std::string(text) + "' must look like name(arg, ...)");
  }
  const std::string_view name = trim(text.substr(0, open));
  std::string_view args = trim(text.substr(open + 1, text.size() - open - 2));
  std::vector<double> params;
  while (!args.empty()) {
    const auto comma = args.find(',');
    const std::string_view tok = trim(args.substr(0, comma));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      fail(ErrorKind::Parameter, "field spec '" + std::string(text) + "': bad number '" + std::string(tok) + "'");
    }
    params.push_back(v);
    if (comma == std::string_view::npos) break;
    args = trim(args.substr(comma + 1));
    if (args.empty()) fail(ErrorKind::Parameter, "field spec '" + std::string(text) + "': trailing comma");
  }
  return catalog(name, params, dim);
}

ScalarField extremal_field(const LebesgueExponent& p, const Point& y, int sign) {
  require_exponent_above_dimension(p, y.dim());
  if (sign != 1 && sign != -1) fail(ErrorKind::Parameter, "extremal_field: sign must be +1 or -1");
  const double beta = p.is_infinite() ? 1.0 : (p.value() - y.dim()) / (p.value() - 1.0);
  const std::string name =
      std::string(sign > 0 ? "+" : "-") + "extremal(p=" + p.to_string() + ",y=" + y.to_string() + ")";
  ScalarField base = make_distance(y, beta, name);
  return sign > 0 ? base : base.scaled(-1.0, name);
}

// ---------------------------------------------------------------- norms

double grad_norm(const ScalarField& f, const Domain& domain, const LebesgueExponent& p, int order) {
  if (auto v = f.closed_form_grad_norm(domain, p)) return *v;
  std::vector<SingularCenter> centers;
  const int n = domain.dim();
  const double g = f.gradient_exponent();
  for (const Point& a : f.singular_points()) {
    const LocationClass loc = domain.classify(a);
    if (loc == LocationClass::Exterior) continue;
    if (loc == LocationClass::Boundary) {
      fail(ErrorKind::Placement, f.name() + ": singular point on the boundary; no closed-form norm available");
    }
    if (p.is_infinite()) {
      if (g < 0.0) fail(ErrorKind::Integrability, f.name() + ": gradient is unbounded, not in L^inf");
      centers.push_back({a, 1});
    } else {
      centers.push_back({a, grading_for_exponent(g * p.value() + n - 1)});
    }
  }
  const VolumeQuadrature q = centers.empty() ? volume_rule(domain, order, VolumeMode::Regular)
                                             : singular_volume_rule(domain, order, centers);
  if (p.is_infinite()) {
    double m = 0.0;
    q.for_each_local([&](const Point& c, const Point& o, double) { m = std::max(m, f.gradient_at(c, o).norm()); });
    return m;
  }
  Accumulator acc;
  const double pv = p.value();
  q.for_each_local([&](const Point& c, const Point& o, double w) {
    acc.add(w * std::pow(f.gradient_at(c, o).norm(), pv));
  });
  return std::pow(acc.value(), 1.0 / pv);
}

std::vector<double> holder_ratios(const ScalarField& f, const Point& a, double alpha, std::span<const double> radii,
                                  int directions) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Parameter, "Hölder exponent must lie in (0, 1)");
  if (directions < 4) fail(ErrorKind::Parameter, "need at least 4 sample directions");
  const int dim = a.dim();
  std::vector<Point> dirs;
  if (dim == 2) {
    for (int j = 0; j < directions; ++j) {
      const double th = 2.0 * std::numbers::pi * j / directions;
      dirs.push_back(Point{std::cos(th), std::sin(th)});
    }
  } else if (dim == 3) {
    // Fibonacci sphere points.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < directions; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / directions;
      const double r = std::sqrt(1.0 - z * z);
      dirs.push_back(Point{r * std::cos(golden * j), r * std::sin(golden * j), z});
    }
  } else {
    for (int i = 0; i < dim; ++i) {
      Point e(dim);
      e[i] = 1.0;
      dirs.push_back(e);
      dirs.push_back(-e);
    }
  }
  const double fa = f(a);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double eps : radii) {
    if (!(eps > 0.0)) fail(ErrorKind::Range, "sampling radii must be positive");
    double m = 0.0;
    for (const Point& u : dirs) m = std::max(m, std::abs(f(a + u * eps) - fa));
    out.push_back(m / std::pow(eps, alpha));
  }
  return out;
}

}  // namespace layerpot
