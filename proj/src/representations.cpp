#include "layerpot/representations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"
#include "layerpot/poisson.hpp"

namespace layerpot {

namespace {

constexpr std::array<IdentityId, 16> kAll = {
    IdentityId::F1,   IdentityId::FIG,  IdentityId::MAT,         IdentityId::COM,
    IdentityId::RP0,  IdentityId::RP1,  IdentityId::CERC,        IdentityId::REP2,
    IdentityId::REP3, IdentityId::F2,   IdentityId::F3,          IdentityId::C2_EXTERIOR,
    IdentityId::GRR,  IdentityId::GREEN_RIEMANN_INTERIOR,        IdentityId::GREEN_RIEMANN_EXTERIOR,
    IdentityId::GREEN_RIEMANN_BOUNDARY,
};

// Tolerance for identities that go through the extrapolated boundary limit ζ.
constexpr double kLimitTolerance = 1e-3;

IdentityReport make_report(IdentityId id, const ScalarField& f, double lhs, double rhs, int order,
                           std::vector<Point> points, double tol) {
  IdentityReport r;
  r.id = id;
  r.field = f.name();
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = std::abs(lhs - rhs);
  r.tolerance = tol;
  r.order = order;
  r.points = std::move(points);
  r.pass = r.residual <= tol;
  return r;
}

void require_location(const Domain& domain, const Point& y, LocationClass want, const char* what) {
  require_same_dim(y, domain.center(), what);
  const LocationClass got = domain.classify(y);
  if (got != want) {
    fail(ErrorKind::Placement, std::string(what) + ": " + y.to_string() + " is " + to_string(got) + ", expected " +
                                   to_string(want));
  }
}

// Polar cells about the singular points of f inside Ω, graded for an
// integrand that behaves like ρ^gamma near them (Jacobian included).
std::vector<SingularCenter> field_centers(const ScalarField& f, const Domain& domain, double gamma) {
  std::vector<SingularCenter> centers;
  for (const Point& a : f.singular_points()) {
    const LocationClass loc = domain.classify(a);
    if (loc == LocationClass::Exterior) continue;
    if (loc == LocationClass::Boundary) {
      fail(ErrorKind::Placement, f.name() + ": singular point " + a.to_string() + " lies on the boundary");
    }
    centers.push_back({a, grading_for_exponent(gamma)});
  }
  return centers;
}

VolumeQuadrature field_rule(const ScalarField& f, const Domain& domain, int order, double gamma) {
  const std::vector<SingularCenter> centers = field_centers(f, domain, gamma);
  return centers.empty() ? volume_rule(domain, order, VolumeMode::Regular)
                         : singular_volume_rule(domain, order, centers);
}

// ∫_Ω f
double volume_integral_of(const ScalarField& f, const Domain& domain, int order) {
  const VolumeQuadrature q = field_rule(f, domain, order, f.value_exponent() + domain.dim() - 1);
  Accumulator acc;
  q.for_each_local([&](const Point& c, const Point& o, double w) { acc.add(w * f.value_at(c, o)); });
  return acc.value();
}

// ∫_Ω ⟨∇f(x), x - z⟩ dx
double gradient_moment(const ScalarField& f, const Domain& domain, const Point& z, int order) {
  const VolumeQuadrature q = field_rule(f, domain, order, f.gradient_exponent() + domain.dim() - 1);
  Accumulator acc;
  q.for_each_local([&](const Point& c, const Point& o, double w) {
    acc.add(w * dot(f.gradient_at(c, o), (c - z) + o));
  });
  return acc.value();
}

// ∫_{∂Ω} f(x) ⟨x - z, ν(x)⟩ dσ
double boundary_moment(const ScalarField& f, const Domain& domain, const Point& z, int order) {
  const BoundaryQuadrature q = boundary_rule(domain, order);
  Accumulator acc;
  for (std::size_t i = 0; i < q.size(); ++i) acc.add(q.weights[i] * f(q.nodes[i]) * dot(q.nodes[i] - z, q.normals[i]));
  return acc.value();
}

double surface_mean(const ScalarField& f, const Domain& domain, int order) {
  const BoundaryQuadrature q = boundary_rule(domain, order);
  Accumulator acc;
  for (std::size_t i = 0; i < q.size(); ++i) acc.add(q.weights[i] * f(q.nodes[i]));
  return acc.value() / domain.surface_measure();
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, count));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

// Upper estimate of the inner nodes spent on ū_f(y) and the volume integral
// at one interior target.
std::size_t inner_cost(const Domain& domain, const ScalarField& f, const Point& y, int order) {
  const double d = domain.distance_to_boundary(y);
  const double diam = domain.diameter();
  const std::size_t cells = 1 + f.singular_points().size();
  const std::size_t radial = static_cast<std::size_t>(std::max(2, order / 2)) * 2;
  if (domain.dim() == 2) {
    int nv = order;
    while (2.0 * std::numbers::pi * diam / nv > d && nv < kMaxEscalatedOrder) nv *= 2;
    int nb = order;
    while (nb * d < 16.0 * diam && nb < kMaxEscalatedOrder) nb *= 2;
    return static_cast<std::size_t>(nv + 128) * radial * cells + static_cast<std::size_t>(nb);
  }
  const std::size_t n = static_cast<std::size_t>(order);
  return n * n * radial * cells + n * n;
}

}  // namespace

const char* to_string(IdentityId id) noexcept {
  switch (id) {
    case IdentityId::F1: return "F1";
    case IdentityId::FIG: return "FIG";
    case IdentityId::MAT: return "MAT";
    case IdentityId::COM: return "COM";
    case IdentityId::RP0: return "RP0";
    case IdentityId::RP1: return "RP1";
    case IdentityId::CERC: return "CERC";
    case IdentityId::REP2: return "REP2";
    case IdentityId::REP3: return "REP3";
    case IdentityId::F2: return "F2";
    case IdentityId::F3: return "F3";
    case IdentityId::C2_EXTERIOR: return "C2_EXTERIOR";
    case IdentityId::GRR: return "GRR";
    case IdentityId::GREEN_RIEMANN_INTERIOR: return "GREEN_RIEMANN_INTERIOR";
    case IdentityId::GREEN_RIEMANN_EXTERIOR: return "GREEN_RIEMANN_EXTERIOR";
    case IdentityId::GREEN_RIEMANN_BOUNDARY: return "GREEN_RIEMANN_BOUNDARY";
  }
  return "?";
}

std::optional<IdentityId> identity_from_string(std::string_view s) {
  for (IdentityId id : kAll) {
    if (s == to_string(id)) return id;
  }
  return std::nullopt;
}

std::span<const IdentityId> all_identities() noexcept { return kAll; }

double default_tolerance(IdentityId id, const ScalarField& f) {
  if (id == IdentityId::F2 || id == IdentityId::F3) return 1e-3;
  return f.singular_points().empty() ? 1e-6 : 1e-4;
}

IdentityReport check_f1(const ScalarField& f, const Domain& domain, const Point& y, int order,
                        std::optional<double> tolerance) {
  require_location(domain, y, LocationClass::Interior, "F1");
  if (f.is_singular_at(y)) fail(ErrorKind::Placement, "F1: " + y.to_string() + " is a singular point of " + f.name());
  const double dl = double_layer(f, domain, y, order).value;
  const double gvi = gradient_volume_integral(f, domain, y, order);
  IdentityReport r = make_report(IdentityId::F1, f, f(y), dl - gvi, order, {y},
                                 tolerance.value_or(default_tolerance(IdentityId::F1, f)));
  r.terms = {{"double_layer", dl}, {"gradient_volume", gvi}};
  return r;
}

IdentityReport check_fig(const ScalarField& f, const Domain& domain, const Point& y, int order,
                         std::optional<double> tolerance) {
  require_same_dim(y, domain.center(), "FIG");
  const double n = domain.dim();
  const double lhs = volume_integral_of(f, domain, order);
  const double b = boundary_moment(f, domain, y, order);
  const double v = gradient_moment(f, domain, y, order);
  IdentityReport r = make_report(IdentityId::FIG, f, lhs, (b - v) / n, order, {y},
                                 tolerance.value_or(default_tolerance(IdentityId::FIG, f)));
  r.terms = {{"boundary_moment", b}, {"gradient_moment", v}};
  return r;
}

IdentityReport check_ball_corollary(IdentityId which, const ScalarField& f, const Ball& ball, const Point& y,
                                    int order, std::optional<double> tolerance) {
  const Domain domain(ball);
  const Point& a = ball.center();
  const double tol = tolerance.value_or(default_tolerance(which, f));
  const int n = ball.dim();
  const double omega = sphere_area_constant(n);
  const double rn = std::pow(ball.radius(), n);

  switch (which) {
    case IdentityId::MAT: {
      IdentityReport r = check_f1(f, domain, y, order, tol);
      r.id = IdentityId::MAT;
      return r;
    }
    case IdentityId::COM: {
      require_location(domain, y, LocationClass::Interior, "COM");
      const double chi = dirichlet_chi(ball, f, order)(y);
      const ResolvedBoundaryRule tr = resolved_boundary_rule(domain, y, order);
      Accumulator acc;
      for (std::size_t i = 0; i < tr.rule.size(); ++i) {
        const Point& x = tr.rule.nodes[i];
        const double r = distance(x, y);
        acc.add(tr.rule.weights[i] * dot(y - a, y - x) * f(x) / std::pow(r, n));
      }
      const double s = acc.value() / (ball.radius() * omega);
      const double gvi = gradient_volume_integral(f, domain, y, order);
      IdentityReport r = make_report(IdentityId::COM, f, f(y), chi + s - gvi, order, {y}, tol);
      r.terms = {{"chi", chi}, {"boundary_correction", s}, {"gradient_volume", gvi}};
      return r;
    }
    case IdentityId::CERC: {
      require_location(domain, y, LocationClass::Interior, "CERC");
      const double vmean = volume_integral_of(f, domain, order) / ball.volume();
      const double smean = surface_mean(f, domain, order);
      const double dl = double_layer(f, domain, y, order).value;
      const double gvi = gradient_volume_integral(f, domain, y, order);
      const double gm = gradient_moment(f, domain, a, order) / (omega * rn);
      IdentityReport r = make_report(IdentityId::CERC, f, f(y), vmean - smean + dl - gvi + gm, order, {y}, tol);
      r.terms = {{"volume_mean", vmean}, {"surface_mean", smean}, {"double_layer", dl},
                 {"gradient_volume", gvi}, {"gradient_moment", gm}};
      return r;
    }
    case IdentityId::REP2: {
      const double smean = surface_mean(f, domain, order);
      const double gvi = gradient_volume_integral(f, domain, a, order);
      IdentityReport r = make_report(IdentityId::REP2, f, smean - f(a), gvi, order, {a}, tol);
      r.terms = {{"surface_mean", smean}, {"gradient_volume", gvi}};
      return r;
    }
    case IdentityId::REP3: {
      const double vmean = volume_integral_of(f, domain, order) / ball.volume();
      const double gvi = gradient_volume_integral(f, domain, a, order);
      const double gm = gradient_moment(f, domain, a, order) / (omega * rn);
      IdentityReport r = make_report(IdentityId::REP3, f, vmean - f(a), gvi - gm, order, {a}, tol);
      r.terms = {{"volume_mean", vmean}, {"gradient_volume", gvi}, {"gradient_moment", gm}};
      return r;
    }
    default:
      fail(ErrorKind::Parameter, std::string(to_string(which)) + " is not a ball corollary");
  }
}

IdentityReport check_rp(IdentityId which, const ScalarField& f, const Domain& domain, const Point& y,
                        const Point& z, int order, std::optional<double> tolerance) {
  if (which != IdentityId::RP0 && which != IdentityId::RP1) {
    fail(ErrorKind::Parameter, std::string(to_string(which)) + " is not RP0 or RP1");
  }
  require_location(domain, y, LocationClass::Interior, to_string(which));
  if (f.is_singular_at(y)) {
    fail(ErrorKind::Placement, std::string(to_string(which)) + ": " + y.to_string() + " is a singular point");
  }
  const Point zz = which == IdentityId::RP1 ? y : z;
  require_same_dim(zz, y, to_string(which));
  const double scale = 1.0 / (domain.dim() * domain.volume());
  const double mean = volume_integral_of(f, domain, order) / domain.volume();
  const double dl = double_layer(f, domain, y, order).value;
  const double bz = boundary_moment(f, domain, zz, order) * scale;
  const double gvi = gradient_volume_integral(f, domain, y, order);
  const double gz = gradient_moment(f, domain, zz, order) * scale;
  IdentityReport r = make_report(which, f, f(y), mean + dl - bz - gvi + gz, order,
                                 which == IdentityId::RP1 ? std::vector<Point>{y} : std::vector<Point>{y, zz},
                                 tolerance.value_or(default_tolerance(which, f)));
  r.terms = {{"mean", mean}, {"double_layer", dl}, {"boundary_moment", bz}, {"gradient_volume", gvi},
             {"gradient_moment", gz}};
  return r;
}

std::pair<IdentityReport, IdentityReport> check_f2_f3(const ScalarField& f, const Domain& domain,
                                                      const F2F3Options& options) {
  const int outer = options.outer_order;
  const int inner = options.inner_order;
  const Point z = options.z.value_or(domain.center());
  require_same_dim(z, domain.center(), "F2");

  // F2: outer regular rule, inner rules targeted at each outer node.
  const std::vector<VolumeQuadrature::Node> nodes = volume_rule(domain, outer, VolumeMode::Regular).materialize();
  std::size_t planned = 0;
  for (const auto& node : nodes) {
    planned += inner_cost(domain, f, node.x, inner);
    if (planned > node_budget()) {
      fail(ErrorKind::Budget, "F2 needs more than " + std::to_string(node_budget()) +
                                  " inner nodes at outer order " + std::to_string(outer) + ", inner order " +
                                  std::to_string(inner) + "; lower the orders or raise LAYERPOT_MAX_NODES");
    }
  }
  std::vector<double> dl(nodes.size());
  std::vector<double> gvi(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    dl[i] = double_layer(f, domain, nodes[i].x, inner).value;
    gvi[i] = gradient_volume_integral(f, domain, nodes[i].x, inner);
  });
  Accumulator lhs2;
  Accumulator vol2;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    lhs2.add(nodes[i].weight * dl[i]);
    vol2.add(nodes[i].weight * gvi[i]);
  }
  const double n = domain.dim();
  const double bz = boundary_moment(f, domain, z, inner) / n;
  const double gz = gradient_moment(f, domain, z, inner) / n;
  IdentityReport f2 = make_report(IdentityId::F2, f, lhs2.value(), bz - gz + vol2.value(), outer, {z},
                                  options.tolerance.value_or(default_tolerance(IdentityId::F2, f)));
  f2.terms = {{"boundary_moment", bz}, {"gradient_moment", gz}, {"gradient_volume", vol2.value()}};
  f2.note = "inner order " + std::to_string(inner);

  // F3 over the outer boundary rule.
  const BoundaryQuadrature bq = boundary_rule(domain, outer);
  std::vector<double> ub(bq.size());
  std::vector<double> zeta(bq.size());
  parallel_for(bq.size(), [&](std::size_t i) {
    ub[i] = double_layer(f, domain, bq.nodes[i], inner).value;
    zeta[i] = boundary_limit_zeta(f, domain, bq.nodes[i], inner, options.zeta_mode);
  });
  Accumulator lhs3;
  Accumulator half;
  Accumulator zs;
  for (std::size_t i = 0; i < bq.size(); ++i) {
    lhs3.add(bq.weights[i] * ub[i]);
    half.add(0.5 * bq.weights[i] * f(bq.nodes[i]));
    zs.add(bq.weights[i] * zeta[i]);
  }
  IdentityReport f3 = make_report(IdentityId::F3, f, lhs3.value(), half.value() + zs.value(), outer, {},
                                  options.tolerance.value_or(default_tolerance(IdentityId::F3, f)));
  f3.terms = {{"half_trace", half.value()}, {"zeta", zs.value()}};
  f3.note = std::string("inner order ") + std::to_string(inner) +
            (options.zeta_mode == ZetaMode::Limit ? ", zeta by limit" : ", zeta algebraic");
  return {std::move(f2), std::move(f3)};
}

IdentityReport check_c2_exterior(const ScalarField& f, const Domain& domain, const Point& y,
                                 const LebesgueExponent& p, int order, std::optional<double> tolerance) {
  require_location(domain, y, LocationClass::Exterior, "C2_EXTERIOR");
  const double dl = double_layer(f, domain, y, order).value;
  const double gvi = gradient_volume_integral(f, domain, y, order);
  IdentityReport r = make_report(IdentityId::C2_EXTERIOR, f, dl, gvi, order, {y},
                                 tolerance.value_or(default_tolerance(IdentityId::C2_EXTERIOR, f)));
  r.note = "p = " + p.to_string();
  return r;
}

std::vector<IdentityReport> check_grr_and_green_riemann(const ScalarField& f, const Domain& domain, const Point& y,
                                                        int order, ZetaMode zeta_mode,
                                                        std::optional<double> tolerance) {
  require_same_dim(y, domain.center(), "GRR");
  const LocationClass loc = domain.classify(y);
  std::vector<IdentityReport> out;
  if (loc == LocationClass::Boundary) {
    const double dl = double_layer(f, domain, y, order).value;
    const double zeta = boundary_limit_zeta(f, domain, y, order, zeta_mode);
    const double tol = tolerance.value_or(zeta_mode == ZetaMode::Limit
                                              ? kLimitTolerance
                                              : default_tolerance(IdentityId::GREEN_RIEMANN_BOUNDARY, f));
    IdentityReport r = make_report(IdentityId::GREEN_RIEMANN_BOUNDARY, f, f(y), 2.0 * dl - 2.0 * zeta, order, {y}, tol);
    r.terms = {{"double_layer", dl}, {"zeta", zeta}};
    r.note = zeta_mode == ZetaMode::Limit ? "zeta by limit" : "zeta algebraic";
    out.push_back(std::move(r));
    return out;
  }
  if (loc == LocationClass::Interior && f.is_singular_at(y)) {
    fail(ErrorKind::Placement, "GRR: " + y.to_string() + " is a singular point of " + f.name());
  }
  const NewtonianTerms nt = newtonian_integrals(f, domain, y, order);
  const double gvi = gradient_volume_integral(f, domain, y, order);
  const double dl = double_layer(f, domain, y, order).value;

  IdentityReport grr = make_report(IdentityId::GRR, f, gvi, nt.boundary_term - nt.volume_term, order, {y},
                                   tolerance.value_or(default_tolerance(IdentityId::GRR, f)));
  grr.terms = {{"boundary_term", nt.boundary_term}, {"volume_term", nt.volume_term}};
  out.push_back(std::move(grr));

  const double combo = dl - nt.boundary_term + nt.volume_term;
  const IdentityId id =
      loc == LocationClass::Interior ? IdentityId::GREEN_RIEMANN_INTERIOR : IdentityId::GREEN_RIEMANN_EXTERIOR;
  IdentityReport gr = make_report(id, f, loc == LocationClass::Interior ? f(y) : 0.0, combo, order, {y},
                                  tolerance.value_or(default_tolerance(id, f)));
  gr.terms = {{"double_layer", dl}, {"boundary_term", nt.boundary_term}, {"volume_term", nt.volume_term}};
  out.push_back(std::move(gr));
  return out;
}

}  // namespace layerpot
