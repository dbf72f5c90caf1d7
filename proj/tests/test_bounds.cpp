#include <doctest.h>

#include <cmath>
#include <numbers>

#include "layerpot/bounds.hpp"
#include "layerpot/errors.hpp"

using namespace layerpot;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected error");
  return ErrorKind::Config;
}

}  // namespace

TEST_CASE("moment integral closed form") {
  CHECK(moment_integral_closed_form(2, 1.0, 1.0) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(moment_integral_closed_form(3, 1.0, 1.0) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(moment_integral_closed_form(2, 1.0, 1.5) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(error_kind([] { (void)moment_integral_closed_form(2, 1.0, 2.0); }) == ErrorKind::Integrability);
  CHECK(error_kind([] { (void)moment_integral_closed_form(3, 1.0, 1.5); }) == ErrorKind::Integrability);
}

TEST_CASE("moment integral by quadrature") {
  for (int n : {2, 3}) {
    for (double pc : {1.0, 1.2, 1.4}) {
      const double exact = moment_integral_closed_form(n, 1.0, pc);
      // Off-centre ball: same integral over a ball about y, by translation.
      const Point c = n == 2 ? Point{0.3, -0.1} : Point{0.3, -0.1, 0.2};
      const Point y = n == 2 ? Point{0.3, -0.1} : Point{0.3, -0.1, 0.2};
      const Domain shifted(Ball(c, 1.0));
      CHECK(moment_integral(shifted, y, pc, 64) == doctest::Approx(exact).epsilon(1e-14));
      // Quadrature about a point other than the centre, compared with a
      // finer rule.
      const Point off = n == 2 ? Point{0.2, 0.1} : Point{0.2, 0.1, 0.0};
      const double a = moment_integral(Domain::unit_ball(n), off, pc, n == 2 ? 128 : 64);
      const double b = moment_integral(Domain::unit_ball(n), off, pc, n == 2 ? 256 : 96);
      CHECK(std::abs(a - b) < 1e-8 * b);
    }
  }
}

TEST_CASE("ball constant") {
  CHECK(ball_constant(2, 1.0, LebesgueExponent::infinity()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ball_constant(2, 2.5, LebesgueExponent::infinity()) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(ball_constant(2, 1.0, LebesgueExponent(3.0)) ==
        doctest::Approx(std::pow(2 * kPi, -1.0 / 3.0) * std::pow(2.0, 2.0 / 3.0)).epsilon(1e-14));
  for (int n : {2, 3}) {
    const LebesgueExponent p(n + 1.0);
    CHECK(ball_constant(n, 1.0, p) < ball_constant(n, 1.1, p));
  }
  CHECK(error_kind([] { (void)ball_constant(3, 1.0, LebesgueExponent(3.0)); }) == ErrorKind::Exponent);
}

TEST_CASE("general bound examples") {
  const Domain disk = Domain::unit_ball(2);
  const Point o{0.0, 0.0};
  const BoundReport inf = ostrowski_bound_general(extremal_field(LebesgueExponent::infinity(), o, 1), disk, o,
                                                  LebesgueExponent::infinity(), 128);
  CHECK(std::abs(inf.ratio - 1.0) < 1e-4);
  const BoundReport p3 =
      ostrowski_bound_general(extremal_field(LebesgueExponent(3.0), o, 1), disk, o, LebesgueExponent(3.0), 128);
  CHECK(std::abs(p3.deviation - 1.0) < 1e-4);
  CHECK(std::abs(p3.bound - 1.0) < 1e-4);
  const BoundReport x1 = ostrowski_bound_general(catalog_from_text("coordinate(1)", 2), disk, o,
                                                 LebesgueExponent::infinity(), 128);
  CHECK(x1.deviation < 1e-14);
  CHECK(x1.bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(error_kind([&] {
          (void)ostrowski_bound_general(catalog_from_text("coordinate(1)", 2), disk, o, LebesgueExponent(2.0), 64);
        }) == ErrorKind::Exponent);
}

TEST_CASE("general bound holds off-centre") {
  const Domain disk = Domain::unit_ball(2);
  for (const char* text : {"coordinate(2)", "harmonic_poly(3)", "quadratic_radial(0.3)", "distance(0.1,-0.2)"}) {
    const ScalarField f = catalog_from_text(text, 2);
    for (double p : {3.0, 6.0}) {
      const BoundReport r = ostrowski_bound_general(f, disk, Point{0.25, 0.3}, LebesgueExponent(p), 128);
      CHECK(r.ratio <= 1.0 + 1e-6);
      CHECK(r.ratio >= 0.0);
    }
  }
}

TEST_CASE("sharpness") {
  for (int n : {2, 3}) {
    const Point o = Point::from(std::vector<double>(n, 0.0));
    for (double pv : {std::numeric_limits<double>::infinity(), n + 1.0, 2.0 * n, 10.0 * n}) {
      const LebesgueExponent p(pv);
      const ScalarField f = extremal_field(p, o, 1);
      const BoundReport g = ostrowski_bound_general(f, Domain::unit_ball(n), o, p, n == 2 ? 256 : 64);
      const BoundReport b = ostrowski_bound_ball(f, Ball(o, 1.0), p, n == 2 ? 256 : 64);
      CHECK(std::abs(g.ratio - 1.0) < 1e-3);
      CHECK(std::abs(b.ratio - 1.0) < 1e-3);
    }
  }
}

TEST_CASE("ball bound examples") {
  const Ball unit(Point{0.0, 0.0}, 1.0);
  const BoundReport d = ostrowski_bound_ball(catalog_from_text("distance(0)", 2), unit, LebesgueExponent::infinity(), 128);
  CHECK(d.deviation == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.bound == doctest::Approx(1.0).epsilon(1e-12));
  const BoundReport h =
      ostrowski_bound_ball(catalog_from_text("power_distance(0,0.5)", 2), unit, LebesgueExponent(3.0), 128);
  CHECK(std::abs(h.ratio - 1.0) < 1e-4);
  const BoundReport c = ostrowski_bound_ball(catalog_from_text("constant(2)", 2), unit, LebesgueExponent(3.0), 64);
  CHECK(c.ratio == 0.0);
}

TEST_CASE("montgomery identity") {
  const Function1D t = function1d_from_text("poly(0,1)");
  const Montgomery1DReport r = montgomery_identity_1d(t, 0.0, 1.0, 0.3);
  CHECK(r.residual < 1e-12);
  CHECK(r.deviation == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(montgomery_identity_1d(function1d_from_text("poly(4)"), -1.0, 2.0, 0.5).residual < 1e-14);
  const Montgomery1DReport sq = montgomery_identity_1d(function1d_from_text("poly(0,0,1)"), 0.0, 1.0, 0.5);
  CHECK(sq.residual < 1e-12);
  // f(1/2) - 1/3
  CHECK(sq.deviation == doctest::Approx(0.25 - 1.0 / 3.0).epsilon(1e-14));
  CHECK(montgomery_identity_1d(function1d_from_text("poly(1,-2,0.5,3,-1)"), -0.5, 1.5, 1.2).residual < 1e-12);
  CHECK(montgomery_identity_1d(function1d_from_text("sin(3)"), 0.0, 2.0, 0.7).residual < 1e-12);
  CHECK(error_kind([] { (void)montgomery_identity_1d(function1d_from_text("poly(1)"), 0.0, 1.0, 1.5); }) ==
        ErrorKind::Range);
  const Montgomery1D m(0.0, 1.0);
  CHECK(m.kernel(0.2, 0.5) == doctest::Approx(0.2));
  CHECK(m.kernel(0.7, 0.5) == doctest::Approx(-0.3));
}

TEST_CASE("ostrowski 1-D branches") {
  const Function1D t = function1d_from_text("poly(0,1)");
  const BoundReport end = ostrowski_bounds_1d(t, 0.0, 1.0, 0.0, Norm1D::Infinity);
  CHECK(end.deviation == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(end.bound == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(end.ratio == doctest::Approx(1.0).epsilon(1e-14));
  const BoundReport mid = ostrowski_bounds_1d(t, 0.0, 1.0, 0.5, Norm1D::Infinity);
  CHECK(mid.deviation < 1e-15);
  CHECK(mid.bound == doctest::Approx(0.25));
  CHECK(ostrowski_bounds_1d(function1d_from_text("poly(3)"), 0.0, 1.0, 0.2, Norm1D::One).ratio == 0.0);
  for (const char* text : {"poly(0,1)", "poly(1,0,-2,1)", "exp(1.5)", "sin(4)"}) {
    const Function1D f = function1d_from_text(text);
    for (double x : {0.0, 0.15, 0.6, 1.0}) {
      CHECK(ostrowski_bounds_1d(f, 0.0, 1.0, x, Norm1D::Infinity).ratio <= 1.0 + 1e-12);
      CHECK(ostrowski_bounds_1d(f, 0.0, 1.0, x, Norm1D::Q, 3.0).ratio <= 1.0 + 1e-12);
      CHECK(ostrowski_bounds_1d(f, 0.0, 1.0, x, Norm1D::One).ratio <= 1.0 + 1e-12);
    }
  }
  CHECK(error_kind([&] { (void)ostrowski_bounds_1d(t, 0.0, 1.0, 0.5, Norm1D::Q, 1.0); }) == ErrorKind::Exponent);
  CHECK(error_kind([] { (void)function1d_from_text("cosh(1)"); }) == ErrorKind::Catalog);
}
