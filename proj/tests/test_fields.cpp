#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "layerpot/errors.hpp"
#include "layerpot/fields.hpp"

using namespace layerpot;
constexpr double kPi = std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Config;
}

// Same field with the catalog closed form stripped, to force quadrature.
ScalarField without_closed_form(const ScalarField& f) {
  ScalarField::Spec s;
  s.name = f.name() + "/quad";
  s.value = [f](const Point& x) { return f(x); };
  s.gradient = [f](const Point& x) { return f.gradient(x); };
  s.local_gradient = [f](const Point& b, const Point& o) { return f.gradient_at(b, o); };
  s.singular_points.assign(f.singular_points().begin(), f.singular_points().end());
  s.value_exponent = f.value_exponent();
  s.gradient_exponent = f.gradient_exponent();
  return ScalarField(s);
}

}  // namespace

TEST_CASE("lebesgue exponent") {
  CHECK(LebesgueExponent(3.0).conjugate() == doctest::Approx(1.5));
  CHECK(LebesgueExponent::infinity().conjugate() == 1.0);
  CHECK(std::isinf(LebesgueExponent(1.0).conjugate()));
  CHECK(kind_of([] { LebesgueExponent(0.5); }) == ErrorKind::Exponent);
  CHECK(kind_of([] { require_exponent_above_dimension(LebesgueExponent(2.0), 2); }) == ErrorKind::Exponent);
  CHECK(LebesgueExponent::infinity().to_string() == "inf");
}

TEST_CASE("catalog values and gradients") {
  const ScalarField c = catalog_from_text("constant(5)", 2);
  CHECK(c(Point{0.3, 0.1}) == 5.0);
  CHECK(c.gradient(Point{0.3, 0.1}).norm() == 0.0);

  const ScalarField d = catalog_from_text("distance(0.1, 0.2)", 2);
  const Point x{0.4, -0.2};
  CHECK(d(x) == doctest::Approx(0.5));
  CHECK(distance(d.gradient(x), Point{0.6, -0.8}) < 1e-15);
  CHECK(kind_of([&] { d.gradient(Point{0.1, 0.2}); }) == ErrorKind::Singularity);

  // β|x-y|^{β-2}(x-y) with β = (p-N)/(p-1), compared with the written form
  // (p-N)/(p-1) (x-y)/|x-y|^{(p+N-2)/(p-1)}.
  const double p = 5.0;
  const int n = 3;
  const double beta = (p - n) / (p - 1);
  const double params[] = {0.0, 0.0, 0.0, beta};
  const ScalarField pw = catalog("power_distance", params, 3);
  const Point z{0.3, -0.2, 0.5};
  const Point expect = z * (beta / std::pow(z.norm(), (p + n - 2) / (p - 1)));
  CHECK(distance(pw.gradient(z), expect) < 1e-14);
  CHECK(pw.holder_exponent().value() == doctest::Approx(0.5));

  const ScalarField h = catalog_from_text("harmonic_poly(2)", 2);
  CHECK(h(Point{0.5, 0.2}) == doctest::Approx(0.25 - 0.04));
  CHECK(catalog_from_text("coordinate(1)", 2)(Point{0.7, 0.1}) == 0.7);
  CHECK(catalog_from_text("quadratic_radial(0)", 3)(Point{1.0, 2.0, 2.0}) == doctest::Approx(9.0));
  CHECK(catalog_from_text("linear(1, 2, -1)", 2)(Point{0.5, 0.5}) == doctest::Approx(1.5));
}

TEST_CASE("finite-difference gradients and Laplacians for every catalog entry") {
  const std::vector<const char*> specs2 = {"constant(2)",       "linear(1,2,-3)",       "coordinate(2)",
                                           "quadratic_radial(0.1)", "harmonic_poly(3)", "harmonic_poly(5)",
                                           "distance(0,0)",     "power_distance(0.2,0.1,0.5)"};
  const Point x{0.45, -0.35};
  for (const char* spec : specs2) {
    CAPTURE(spec);
    const ScalarField f = catalog_from_text(spec, 2);
    const Point g = f.gradient(x);
    double lap = -4.0 * f(x);
    const double hs = 1e-6;
    const double hl = 1e-3;
    for (int i = 0; i < 2; ++i) {
      Point p = x;
      Point m = x;
      p[i] += hs;
      m[i] -= hs;
      CHECK(std::abs((f(p) - f(m)) / (2 * hs) - g[i]) < 1e-5);
      Point pl = x;
      Point ml = x;
      pl[i] += hl;
      ml[i] -= hl;
      lap += f(pl) + f(ml);
    }
    CHECK(std::abs(lap / (hl * hl) - f.laplacian(x)) < 1e-4);
  }
}

TEST_CASE("extremal fields") {
  const ScalarField a = extremal_field(LebesgueExponent::infinity(), Point{0.0, 0.0}, 1);
  CHECK(a(Point{0.3, 0.4}) == doctest::Approx(0.5));
  const ScalarField b = extremal_field(LebesgueExponent(3.0), Point{0.0, 0.0}, 1);
  CHECK(b(Point{0.0, 0.25}) == doctest::Approx(0.5));
  const ScalarField c = extremal_field(LebesgueExponent(5.0), Point{0.0, 0.0, 0.0}, -1);
  CHECK(c(Point{0.0, 0.0, 0.25}) == doctest::Approx(-0.5));
  CHECK(kind_of([] { extremal_field(LebesgueExponent(2.0), Point{0.0, 0.0}, 1); }) == ErrorKind::Exponent);
  CHECK(kind_of([] { catalog_from_text("power_distance(0,0,-1)", 2); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { catalog_from_text("bump(1)", 2); }) == ErrorKind::Catalog);
}

TEST_CASE("gradient norms") {
  const Domain disk = Domain::unit_ball(2);
  const Point o{0.0, 0.0};
  CHECK(grad_norm(extremal_field(LebesgueExponent::infinity(), o, 1), disk, LebesgueExponent::infinity()) == 1.0);
  // 2π ∫_0^1 (r^{-1/2}/2)^3 r dr = π/2.
  const LebesgueExponent p3(3.0);
  const ScalarField ext = extremal_field(p3, o, 1);
  CHECK(grad_norm(ext, disk, p3) == doctest::Approx(std::cbrt(kPi / 2)).epsilon(1e-14));
  CHECK(std::abs(grad_norm(without_closed_form(ext), disk, p3, 128) - std::cbrt(kPi / 2)) < 1e-10);
  CHECK(grad_norm(catalog_from_text("constant(3)", 2), disk, p3) == 0.0);
  // Off-centre singular point: closed form on a ball centred there vs quadrature.
  const Point a{0.2, 0.1};
  const ScalarField pw = catalog_from_text("power_distance(0.2,0.1,0.6)", 2);
  const Domain shifted(Ball(a, 1.0));
  const LebesgueExponent p4(4.0);
  CHECK(std::abs(grad_norm(without_closed_form(pw), shifted, p4) - grad_norm(pw, shifted, p4)) < 1e-9);
  // Smooth field by quadrature: ‖∇|x|²‖_2 on the unit disk = (∫4r² dx)^{1/2} = √(2π).
  const ScalarField q = without_closed_form(catalog_from_text("quadratic_radial(0)", 2));
  CHECK(grad_norm(q, disk, LebesgueExponent(2.0)) == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-12));
  CHECK(kind_of([&] { grad_norm(without_closed_form(ext), disk, LebesgueExponent::infinity()); }) ==
        ErrorKind::Integrability);
}

TEST_CASE("hypothesis (H) sampler") {
  const ScalarField f = catalog_from_text("power_distance(0,0,0.5)", 2);
  const double radii[] = {1e-1, 1e-2, 1e-3};
  for (double r : holder_ratios(f, Point{0.0, 0.0}, 0.5, radii)) CHECK(r == doctest::Approx(1.0));
  const ScalarField g = catalog_from_text("coordinate(1)", 3);
  for (double r : holder_ratios(g, Point{0.1, 0.1, 0.1}, 0.5, radii)) CHECK(r <= 1.0);
}
