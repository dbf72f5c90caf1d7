#include "layerpot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"
#include "layerpot/potentials.hpp"

namespace layerpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A vanishing bound forces a vanishing deviation; rounding in the mean
// (relative to `scale`) is not counted as a violation.
double safe_ratio(double deviation, double bound, double scale) {
  if (bound == 0.0) return deviation <= 1e-13 * std::max(1.0, scale) ? 0.0 : kInf;
  return deviation / bound;
}

void require_integrable_moment(int dim, double p_conjugate) {
  if (!(p_conjugate >= 1.0) || !((dim - 1) * p_conjugate < dim)) {
    fail(ErrorKind::Integrability, "moment integral diverges: (N-1)p' = " + std::to_string((dim - 1) * p_conjugate) +
                                       " is not below N = " + std::to_string(dim));
  }
}

}  // namespace

double moment_integral_closed_form(int dim, double radius, double p_conjugate) {
  require_integrable_moment(dim, p_conjugate);
  if (!(radius > 0.0)) fail(ErrorKind::Range, "radius must be positive");
  const double e = dim - (dim - 1) * p_conjugate;
  return sphere_area_constant(dim) * std::pow(radius, e) / e;
}

double moment_integral(const Domain& domain, const Point& y, double p_conjugate, int order) {
  require_same_dim(y, domain.center(), "moment_integral");
  const int n = domain.dim();
  require_integrable_moment(n, p_conjugate);
  if (domain.is_ball() && distance(y, domain.center()) == 0.0) {
    return moment_integral_closed_form(n, domain.ball().radius(), p_conjugate);
  }
  return moment_integral_quadrature(domain, y, p_conjugate, order);
}

double moment_integral_quadrature(const Domain& domain, const Point& y, double p_conjugate, int order) {
  require_same_dim(y, domain.center(), "moment_integral");
  const int n = domain.dim();
  require_integrable_moment(n, p_conjugate);
  if (domain.classify(y) != LocationClass::Interior) {
    fail(ErrorKind::Placement, "moment_integral: " + y.to_string() + " must be interior");
  }
  const double s = -(n - 1) * p_conjugate;
  const SingularCenter c{y, grading_for_exponent(s + n - 1)};
  const VolumeQuadrature q = singular_volume_rule(domain, order, {&c, 1});
  Accumulator acc;
  q.for_each_local([&](const Point& ctr, const Point& o, double w) {
    acc.add(w * std::pow(((ctr - y) + o).norm(), s));
  });
  return acc.value();
}

double ball_constant(int dim, double radius, const LebesgueExponent& p) {
  require_exponent_above_dimension(p, dim);
  const double pc = p.conjugate();
  const double e = dim - (dim - 1) * pc;
  return std::pow(sphere_area_constant(dim), 1.0 / pc - 1.0) * std::pow(std::pow(radius, e) / e, 1.0 / pc);
}

BoundReport ostrowski_bound_general(const ScalarField& f, const Domain& domain, const Point& y,
                                    const LebesgueExponent& p, int order) {
  require_exponent_above_dimension(p, domain.dim());
  if (domain.classify(y) != LocationClass::Interior) {
    fail(ErrorKind::Placement, "ostrowski_bound_general: " + y.to_string() + " must be interior");
  }
  BoundReport r;
  r.kind = "general";
  r.field = f.name();
  r.p = p.value();
  r.p_conjugate = p.conjugate();
  r.domain = domain.describe();
  r.y = y;
  r.order = order;
  r.deviation = std::abs(f(y) - double_layer(f, domain, y, order).value);
  const double pc = p.conjugate();
  const double moment = moment_integral(domain, y, pc, order);
  r.bound = grad_norm(f, domain, p, order) / sphere_area_constant(domain.dim()) * std::pow(moment, 1.0 / pc);
  r.ratio = safe_ratio(r.deviation, r.bound, std::abs(f(y)));
  return r;
}

BoundReport ostrowski_bound_ball(const ScalarField& f, const Ball& ball, const LebesgueExponent& p, int order) {
  const int n = ball.dim();
  require_exponent_above_dimension(p, n);
  const Domain domain(ball);
  const BoundaryQuadrature q = boundary_rule(domain, order);
  Accumulator acc;
  for (std::size_t i = 0; i < q.size(); ++i) acc.add(q.weights[i] * f(q.nodes[i]));
  BoundReport r;
  r.kind = "ball";
  r.field = f.name();
  r.p = p.value();
  r.p_conjugate = p.conjugate();
  r.radius = ball.radius();
  r.domain = domain.describe();
  r.y = ball.center();
  r.order = order;
  r.deviation = std::abs(f(ball.center()) - acc.value() / ball.surface_measure());
  r.bound = ball_constant(n, ball.radius(), p) * grad_norm(f, domain, p, order);
  r.ratio = safe_ratio(r.deviation, r.bound, std::abs(f(ball.center())));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss–Legendre on [-1, 1] by Newton iteration on P_n.
Rule1D legendre_rule(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

template <class G>
double integrate(const Rule1D& rule, double lo, double hi, G&& g) {
  if (hi <= lo) return 0.0;
  const double h = 0.5 * (hi - lo);
  const double m = 0.5 * (hi + lo);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * g(m + h * rule.x[i]);
  return s * h;
}

// Composite rule: `panels` equal panels of an n-point rule.
template <class G>
double integrate_panels(const Rule1D& rule, double lo, double hi, int panels, G&& g) {
  double s = 0.0;
  const double step = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) s += integrate(rule, lo + k * step, lo + (k + 1) * step, g);
  return s;
}

constexpr int kPanels = 64;
constexpr int kPanelNodes = 16;

double mean_1d(const Function1D& f, double a, double b) {
  const Rule1D rule = legendre_rule(kPanelNodes);
  return integrate_panels(rule, a, b, kPanels, f.value) / (b - a);
}

void check_interval(double a, double b, double x) {
  if (!(a < b)) fail(ErrorKind::Range, "interval needs a < b");
  if (!(x >= a && x <= b)) fail(ErrorKind::Range, "x = " + std::to_string(x) + " lies outside [a, b]");
}

}  // namespace

Function1D function1d_from_text(std::string_view text) {
  const std::size_t open = text.find('(');
  const std::size_t close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    fail(ErrorKind::Parameter, "expected name(params): " + std::string(text));
  }
  const std::string name(text.substr(0, open));
  std::vector<double> params;
  std::string body(text.substr(open + 1, close - open - 1));
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    const std::string item = body.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      fail(ErrorKind::Parameter, "bad number '" + item + "' in " + std::string(text));
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      fail(ErrorKind::Parameter, "bad number '" + item + "' in " + std::string(text));
    }
    params.push_back(v);
    pos = comma + 1;
  }
  Function1D f;
  f.name = std::string(text);
  if (name == "poly") {
    if (params.empty()) fail(ErrorKind::Parameter, "poly needs at least one coefficient");
    f.value = [params](double t) {
      double s = 0.0;
      for (std::size_t k = params.size(); k-- > 0;) s = s * t + params[k];
      return s;
    };
    f.derivative = [params](double t) {
      double s = 0.0;
      for (std::size_t k = params.size(); k-- > 1;) s = s * t + k * params[k];
      return s;
    };
    return f;
  }
  if (params.size() != 1) fail(ErrorKind::Parameter, name + " takes one parameter");
  const double k = params[0];
  if (name == "sin") {
    f.value = [k](double t) { return std::sin(k * t); };
    f.derivative = [k](double t) { return k * std::cos(k * t); };
    return f;
  }
  if (name == "exp") {
    f.value = [k](double t) { return std::exp(k * t); };
    f.derivative = [k](double t) { return k * std::exp(k * t); };
    return f;
  }
  fail(ErrorKind::Catalog, "unknown 1-D function '" + name + "'");
}

Montgomery1D::Montgomery1D(double a, double b) : a_(a), b_(b) {
  if (!(a < b)) fail(ErrorKind::Range, "interval needs a < b");
}

double Montgomery1D::kernel(double t, double x) const { return t <= x ? t - a_ : t - b_; }

Montgomery1DReport montgomery_identity_1d(const Function1D& f, double a, double b, double x, int nodes) {
  check_interval(a, b, x);
  if (nodes < 1) fail(ErrorKind::Parameter, "node count must be positive");
  const Montgomery1D m(a, b);
  const Rule1D rule = legendre_rule(nodes);
  const double mean = (integrate(rule, a, x, f.value) + integrate(rule, x, b, f.value)) / (b - a);
  auto weighted = [&](double t) { return m.kernel(t, x) * f.derivative(t); };
  // Split at x so each side sees one polynomial branch of the kernel.
  const double left = integrate(rule, a, x, weighted);
  const double right = integrate(rule, x, b, weighted);
  Montgomery1DReport r;
  r.lhs = f.value(x);
  r.rhs = mean + (left + right) / (b - a);
  r.residual = std::abs(r.lhs - r.rhs);
  r.deviation = r.lhs - mean;
  return r;
}

BoundReport ostrowski_bounds_1d(const Function1D& f, double a, double b, double x, Norm1D norm, double q) {
  check_interval(a, b, x);
  const double len = b - a;
  const double mid = 0.5 * (a + b);
  const Rule1D rule = legendre_rule(kPanelNodes);
  BoundReport r;
  r.field = f.name;
  r.domain = "[" + std::to_string(a) + ", " + std::to_string(b) + "]";
  r.y = Point{x, 0.0};
  r.order = kPanels * kPanelNodes;
  r.deviation = std::abs(f.value(x) - mean_1d(f, a, b));
  switch (norm) {
    case Norm1D::Infinity: {
      double sup = 0.0;
      constexpr int kSamples = 4096;
      for (int k = 0; k <= kSamples; ++k) sup = std::max(sup, std::abs(f.derivative(a + len * k / kSamples)));
      const double s = (x - mid) / len;
      r.kind = "1d-inf";
      r.p = kInf;
      r.p_conjugate = 1.0;
      r.bound = (0.25 + s * s) * len * sup;
      break;
    }
    case Norm1D::Q: {
      if (!(q > 1.0) || std::isinf(q)) fail(ErrorKind::Exponent, "q-branch needs 1 < q < inf");
      const double p = q / (q - 1.0);
      const double nq = std::pow(integrate_panels(rule, a, b, kPanels,
                                                  [&](double t) { return std::pow(std::abs(f.derivative(t)), q); }),
                                 1.0 / q);
      const double u = (x - a) / len;
      const double v = (b - x) / len;
      r.kind = "1d-q";
      r.p = q;
      r.p_conjugate = p;
      r.bound = std::pow(p + 1.0, -1.0 / p) * std::pow(std::pow(u, p + 1.0) + std::pow(v, p + 1.0), 1.0 / p) *
                std::pow(len, 1.0 / p) * nq;
      break;
    }
    case Norm1D::One: {
      const double n1 = integrate_panels(rule, a, b, kPanels, [&](double t) { return std::abs(f.derivative(t)); });
      r.kind = "1d-1";
      r.p = 1.0;
      r.p_conjugate = kInf;
      r.bound = (0.5 + std::abs(x - mid) / len) * n1;
      break;
    }
  }
  r.ratio = safe_ratio(r.deviation, r.bound, std::abs(f.value(x)));
  return r;
}

}  // namespace layerpot
