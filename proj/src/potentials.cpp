#include "layerpot/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"

namespace layerpot {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// 2-D trapezoid error for a target at distance d decays like exp(-n d / R);
// n d >= 16 diam keeps it near rounding.
constexpr double kResolvedProduct = 16.0;

}  // namespace

ResolvedBoundaryRule resolved_boundary_rule(const Domain& domain, const Point& y, int order) {
  require_same_dim(y, domain.center(), "resolved_boundary_rule");
  ResolvedBoundaryRule out;
  const double d = domain.distance_to_boundary(y);
  const double diam = domain.diameter();
  int n = order;
  out.warning = kTwoPi * diam / order > d;
  if (domain.dim() == 2) {
    while (n * d < kResolvedProduct * diam && n < kMaxEscalatedOrder) n *= 2;
    out.under_resolved = kTwoPi * diam / n > d;
  }
  out.rule = boundary_rule_for_target(domain, n, y);
  return out;
}

namespace {

// Planar boundary target: the rule starts at the target, so node 0 coincides
// with it and is replaced by the kernel limit κ/(4π).
double planar_boundary_kernel_limit(const Domain& domain, const Point& z) {
  if (domain.is_ball()) return 1.0 / (2.0 * kTwoPi * domain.ball().radius());
  const Point rel = z - domain.star().center();
  return domain.star().curvature(std::atan2(rel[1], rel[0])) / (2.0 * kTwoPi);
}

void require_offset_target(const Domain& domain, const Point& y, const char* what) {
  if (domain.classify(y) == LocationClass::Boundary) {
    fail(ErrorKind::Placement, std::string(what) + ": target " + y.to_string() + " lies on the boundary");
  }
}

bool monotone(std::span<const double> v) {
  int sign = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double diff = v[i] - v[i - 1];
    if (std::abs(diff) <= 1e-12 * (1.0 + std::abs(v[i]))) continue;
    const int s = diff > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return true;
}

}  // namespace

LayerEvaluation double_layer(const Moment& h, const Domain& domain, const Point& y, int order) {
  require_same_dim(y, domain.center(), "double_layer");
  const FundamentalSolution kernel(domain.dim());
  LayerEvaluation ev;
  ev.location = domain.classify(y);
  Accumulator acc;
  if (ev.location == LocationClass::Boundary) {
    const BoundaryQuadrature q = boundary_rule_for_target(domain, order, y);
    ev.quadrature_order = order;
    std::size_t start = 0;
    if (domain.dim() == 2) {
      acc.add(q.weights[0] * h(q.nodes[0]) * planar_boundary_kernel_limit(domain, q.nodes[0]));
      start = 1;
    }
    for (std::size_t i = start; i < q.size(); ++i) {
      acc.add(q.weights[i] * h(q.nodes[i]) * kernel.normal_derivative(q.nodes[i] - y, q.normals[i]));
    }
  } else {
    const ResolvedBoundaryRule tr = resolved_boundary_rule(domain, y, order);
    ev.quadrature_order = tr.rule.order;
    ev.warning = tr.warning;
    ev.under_resolved = tr.under_resolved;
    const BoundaryQuadrature& q = tr.rule;
    for (std::size_t i = 0; i < q.size(); ++i) {
      acc.add(q.weights[i] * h(q.nodes[i]) * kernel.normal_derivative(q.nodes[i] - y, q.normals[i]));
    }
  }
  ev.value = acc.value();
  return ev;
}

LayerEvaluation double_layer(const ScalarField& h, const Domain& domain, const Point& y, int order) {
  return double_layer([&h](const Point& x) { return h(x); }, domain, y, order);
}

std::vector<LayerEvaluation> double_layer_batch(const Moment& h, const Domain& domain,
                                                std::span<const Point> targets, int order) {
  std::vector<LayerEvaluation> out(targets.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, targets.size()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < targets.size(); i += workers) out[i] = double_layer(h, domain, targets[i], order);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

double richardson_limit(std::span<const double> distances, std::span<const double> values) {
  if (distances.size() != values.size() || distances.size() < 2) {
    fail(ErrorKind::Parameter, "Richardson extrapolation needs at least two (distance, value) pairs");
  }
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < distances.size(); ++i) {
    if (distances[i] < distances[i1]) i1 = i;
  }
  std::size_t i2 = i1 == 0 ? 1 : 0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (i != i1 && distances[i] < distances[i2]) i2 = i;
  }
  const double d1 = distances[i1];
  const double d2 = distances[i2];
  if (!(d2 > d1)) fail(ErrorKind::Parameter, "Richardson extrapolation needs two distinct distances");
  return (d2 * values[i1] - d1 * values[i2]) / (d2 - d1);
}

JumpReport jump_relation_check(const Moment& h, const Domain& domain, const Point& y0,
                               std::span<const double> distances, int order) {
  if (distances.size() < 2) fail(ErrorKind::Parameter, "jump relation check needs at least two distances");
  std::vector<double> ds(distances.begin(), distances.end());
  std::sort(ds.begin(), ds.end(), std::greater<>());
  const std::vector<Point> inner = closest_boundary_approach(domain, y0, ds);
  const Point nu = domain.normal_at(y0);
  std::vector<Point> outer;
  for (double d : ds) {
    const Point p = y0 + nu * d;
    if (domain.classify(p) != LocationClass::Exterior) {
      fail(ErrorKind::Range, "jump relation check: exterior sample at distance " + std::to_string(d) + " is not outside");
    }
    outer.push_back(p);
  }
  std::vector<Point> all = inner;
  all.insert(all.end(), outer.begin(), outer.end());
  all.push_back(y0);
  const std::vector<LayerEvaluation> ev = double_layer_batch(h, domain, all, order);

  JumpReport r;
  r.distances = ds;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ev[i].under_resolved || ev[ds.size() + i].under_resolved) {
      fail(ErrorKind::Resolution, "jump relation check: distance " + std::to_string(ds[i]) +
                                      " is below what order " + std::to_string(kMaxEscalatedOrder) + " resolves");
    }
    r.interior_values.push_back(ev[i].value);
    r.exterior_values.push_back(ev[ds.size() + i].value);
  }
  if (!monotone(r.interior_values) || !monotone(r.exterior_values)) {
    fail(ErrorKind::Resolution, "jump relation check: one-sided samples are not monotone (quadrature under-resolved)");
  }
  r.interior_limit = richardson_limit(ds, r.interior_values);
  r.exterior_limit = richardson_limit(ds, r.exterior_values);
  r.boundary_value = ev.back().value;
  return r;
}

double gradient_volume_integral(const ScalarField& f, const Domain& domain, const Point& y, int order) {
  require_same_dim(y, domain.center(), "gradient_volume_integral");
  require_offset_target(domain, y, "gradient_volume_integral");
  const int n = domain.dim();
  const bool interior = domain.classify(y) == LocationClass::Interior;
  const double tol = domain.boundary_tolerance();
  const double g = f.gradient_exponent();
  std::vector<SingularCenter> centers;
  if (interior) centers.push_back({y, f.is_singular_at(y) ? grading_for_exponent(g) : 1});
  for (const Point& a : f.singular_points()) {
    if (interior && distance(a, y) <= tol) continue;
    const LocationClass loc = domain.classify(a);
    if (loc == LocationClass::Exterior) continue;
    if (loc == LocationClass::Boundary) {
      fail(ErrorKind::Placement, f.name() + ": singular point " + a.to_string() + " lies on the boundary");
    }
    centers.push_back({a, grading_for_exponent(g + n - 1)});
  }
  const VolumeQuadrature q = centers.empty() ? volume_rule(domain, order, VolumeMode::Regular)
                                             : singular_volume_rule(domain, order, centers);
  const double omega = sphere_area_constant(n);
  Accumulator acc;
  q.for_each_local([&](const Point& c, const Point& o, double w) {
    const Point d = (c - y) + o;
    const double r = d.norm();
    double rn = r;
    for (int i = 1; i < n; ++i) rn *= r;
    acc.add(w * dot(d, f.gradient_at(c, o)) / (omega * rn));
  });
  return acc.value();
}

double boundary_limit_zeta(const ScalarField& f, const Domain& domain, const Point& z, int order, ZetaMode mode) {
  if (domain.classify(z) != LocationClass::Boundary) {
    fail(ErrorKind::Placement, "boundary_limit_zeta: " + z.to_string() + " is not a boundary point");
  }
  if (mode == ZetaMode::Algebraic) return double_layer(f, domain, z, order).value - 0.5 * f(z);
  std::vector<double> ds;
  for (double frac : kZetaLimitFractions) ds.push_back(frac * domain.diameter());
  const std::vector<Point> ts = closest_boundary_approach(domain, z, ds);
  std::vector<double> vals(ts.size());
  std::vector<std::future<double>> jobs;
  for (const Point& t : ts) {
    jobs.push_back(std::async(std::launch::async, [&, t] { return gradient_volume_integral(f, domain, t, order); }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) vals[i] = jobs[i].get();
  return richardson_limit(ds, vals);
}

NewtonianTerms newtonian_integrals(const ScalarField& f, const Domain& domain, const Point& y, int order) {
  require_same_dim(y, domain.center(), "newtonian_integrals");
  if (!f.has_laplacian()) fail(ErrorKind::Capability, f.name() + " has no Laplacian");
  require_offset_target(domain, y, "newtonian_integrals");
  const int n = domain.dim();
  const FundamentalSolution kernel(n);
  NewtonianTerms out;

  const ResolvedBoundaryRule tr = resolved_boundary_rule(domain, y, order);
  Accumulator bacc;
  for (std::size_t i = 0; i < tr.rule.size(); ++i) {
    const Point& x = tr.rule.nodes[i];
    bacc.add(tr.rule.weights[i] * dot(f.gradient(x), tr.rule.normals[i]) * kernel.value(x - y));
  }
  out.boundary_term = bacc.value();

  // E ~ log ρ (N = 2) or ρ^{2-N}; with the Jacobian the radial integrand is
  // ρ log ρ resp. ρ. Δf of a singular field behaves like ρ^{β-2}.
  const bool interior = domain.classify(y) == LocationClass::Interior;
  const double tol = domain.boundary_tolerance();
  const double lap_exp = f.gradient_exponent() - 1.0;
  std::vector<SingularCenter> centers;
  if (interior) {
    const double gamma = (f.is_singular_at(y) ? lap_exp : 0.0) + 1.0;
    centers.push_back({y, grading_for_exponent(gamma, n == 2)});
  }
  for (const Point& a : f.singular_points()) {
    if (interior && distance(a, y) <= tol) continue;
    const LocationClass loc = domain.classify(a);
    if (loc == LocationClass::Exterior) continue;
    if (loc == LocationClass::Boundary) {
      fail(ErrorKind::Placement, f.name() + ": singular point " + a.to_string() + " lies on the boundary");
    }
    centers.push_back({a, grading_for_exponent(lap_exp + n - 1)});
  }
  const VolumeQuadrature q = centers.empty() ? volume_rule(domain, order, VolumeMode::Regular)
                                             : singular_volume_rule(domain, order, centers);
  Accumulator vacc;
  q.for_each_local([&](const Point& c, const Point& o, double w) {
    vacc.add(w * f.laplacian_at(c, o) * kernel.value((c - y) + o));
  });
  out.volume_term = vacc.value();
  return out;
}

double holder_sphere_ratio(const ScalarField& f, const Point& y, double alpha, double eps, int order) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Parameter, "Hölder exponent must lie in (0, 1)");
  if (!(eps > 0.0)) fail(ErrorKind::Range, "sphere radius must be positive");
  const Domain sphere(Ball(y, eps));
  const BoundaryQuadrature q = boundary_rule(sphere, order);
  const double fy = f(y);
  Accumulator acc;
  for (std::size_t i = 0; i < q.size(); ++i) acc.add(q.weights[i] * (f(q.nodes[i]) - fy));
  return acc.value() * std::pow(eps, -alpha) * std::pow(eps, alpha + 1.0 - y.dim());
}

}  // namespace layerpot
