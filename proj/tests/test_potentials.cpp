#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "layerpot/errors.hpp"
#include "layerpot/potentials.hpp"

using namespace layerpot;
constexpr double kPi = std::numbers::pi;

namespace {

const Moment kOne = [](const Point&) { return 1.0; };
const Moment kX1 = [](const Point& x) { return x[0]; };

// Unit circle, moment x1: ū = y1/2 inside, -y1/(2|y|²) outside, 0 on the circle.
double circle_x1_layer(const Point& y) {
  const double r2 = y.norm_squared();
  if (r2 < 1.0) return 0.5 * y[0];
  if (r2 > 1.0) return -0.5 * y[0] / r2;
  return 0.0;
}

}  // namespace

TEST_CASE("Gauss trichotomy") {
  const Domain disk = Domain::unit_ball(2);
  CHECK(std::abs(double_layer(kOne, disk, Point{0.0, 0.0}, 64).value - 1.0) < 1e-10);
  CHECK(std::abs(double_layer(kOne, disk, Point{2.0, 0.0}, 64).value) < 1e-10);
  CHECK(std::abs(double_layer(kOne, disk, Point{1.0, 0.0}, 64).value - 0.5) < 1e-10);

  const Domain ball = Domain::unit_ball(3);
  for (const Point& y : {Point{0.0, 0.0, 0.0}, Point{0.3, -0.5, 0.6}, Point{0.0, 0.0, 0.9}}) {
    CHECK(std::abs(double_layer(kOne, ball, y, 64).value - 1.0) < 1e-10);
  }
  for (const Point& y : {Point{0.0, 0.0, 1.1}, Point{2.0, 1.0, 0.0}}) {
    CHECK(std::abs(double_layer(kOne, ball, y, 64).value) < 1e-10);
  }
  CHECK(std::abs(double_layer(kOne, ball, Point{0.6, 0.0, 0.8}, 64).value - 0.5) < 1e-10);

  const Domain star(StarShaped2D(Point{0.0, 0.0}, {1.0, 0.15, 0.0, 0.0, 0.1}));
  CHECK(std::abs(double_layer(kOne, star, Point{0.2, 0.1}, 128).value - 1.0) < 1e-10);
  CHECK(std::abs(double_layer(kOne, star, Point{2.0, 1.0}, 128).value) < 1e-10);
  CHECK(std::abs(double_layer(kOne, star, star.star().boundary_point(0.7), 128).value - 0.5) < 1e-10);
}

TEST_CASE("double layer of x1 on the unit circle") {
  const Domain disk = Domain::unit_ball(2);
  for (const Point& y : {Point{0.3, 0.2}, Point{0.95, 0.0}, Point{-0.2, 0.9}, Point{1.5, 0.5}, Point{0.6, 0.8},
                         Point{-3.0, 1.0}}) {
    CAPTURE(y.to_string());
    CHECK(std::abs(double_layer(kX1, disk, y, 64).value - circle_x1_layer(y)) < 1e-10);
  }
}

TEST_CASE("near-boundary escalation metadata") {
  const Domain disk = Domain::unit_ball(2);
  const LayerEvaluation far = double_layer(kOne, disk, Point{0.0, 0.0}, 64);
  CHECK_FALSE(far.warning);
  CHECK(far.quadrature_order == 64);
  const LayerEvaluation near = double_layer(kOne, disk, Point{0.99, 0.0}, 64);
  CHECK(near.warning);
  CHECK(near.quadrature_order > 64);
  CHECK_FALSE(near.under_resolved);
  CHECK(std::abs(near.value - 1.0) < 1e-10);
  const LayerEvaluation tight = double_layer(kOne, disk, Point{0.9999, 0.0}, 64);
  CHECK(tight.under_resolved);
}

TEST_CASE("batch evaluation matches single evaluation") {
  const Domain disk = Domain::unit_ball(2);
  std::vector<Point> ys;
  for (int i = 0; i < 17; ++i) ys.push_back(Point{0.1 * i - 0.8, 0.05 * i});
  const auto batch = double_layer_batch(kX1, disk, ys, 64);
  for (std::size_t i = 0; i < ys.size(); ++i) CHECK(batch[i].value == double_layer(kX1, disk, ys[i], 64).value);
}

TEST_CASE("jump relations") {
  const Domain disk = Domain::unit_ball(2);
  const double ds[] = {1e-2, 5e-3};
  const JumpReport one = jump_relation_check(kOne, disk, Point{0.0, 1.0}, ds, 64);
  CHECK(std::abs(one.interior_limit - 1.0) < 1e-8);
  CHECK(std::abs(one.exterior_limit) < 1e-8);
  CHECK(std::abs(one.boundary_value - 0.5) < 1e-10);

  const JumpReport x1 = jump_relation_check(kX1, disk, Point{1.0, 0.0}, ds, 64);
  CHECK(std::abs(x1.interior_limit - x1.exterior_limit - 1.0) < 1e-4);
  CHECK(std::abs(x1.interior_limit - 0.5) < 1e-4);
  CHECK(std::abs(x1.boundary_value) < 1e-12);

  const Moment zero = [](const Point&) { return 0.0; };
  const JumpReport z = jump_relation_check(zero, disk, Point{1.0, 0.0}, ds, 64);
  CHECK(z.interior_limit == 0.0);
  CHECK(z.exterior_limit == 0.0);
  CHECK(z.boundary_value == 0.0);

  const double too_close[] = {1e-4, 5e-5};
  try {
    (void)jump_relation_check(kX1, disk, Point{1.0, 0.0}, too_close, 64);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resolution);
  }
}

TEST_CASE("richardson limit") {
  const double d[] = {0.4, 0.1, 0.2};
  const double v[] = {3.0 + 0.8, 3.0 + 0.2, 3.0 + 0.4};
  CHECK(richardson_limit(d, v) == doctest::Approx(3.0));
}

TEST_CASE("gradient volume integral") {
  const Domain disk = Domain::unit_ball(2);
  CHECK(std::abs(gradient_volume_integral(catalog_from_text("constant(3)", 2), disk, Point{0.2, 0.1}, 64)) < 1e-15);
  // distance(a) at y = a: ∫ |x|^{1-N}/ω_N = R.
  CHECK(std::abs(gradient_volume_integral(catalog_from_text("distance(0,0)", 2), disk, Point{0.0, 0.0}, 64) - 1.0) <
        1e-12);
  CHECK(std::abs(gradient_volume_integral(catalog_from_text("distance(0,0,0)", 3), Domain::unit_ball(3),
                                          Point{0.0, 0.0, 0.0}, 32) -
                 1.0) < 1e-12);
  const ScalarField x1 = catalog_from_text("coordinate(1)", 2);
  CHECK(std::abs(gradient_volume_integral(x1, disk, Point{0.0, 0.0}, 64)) < 1e-14);
  // Circle oracle: ∫⟨∇E(x-y), e1⟩ = ū_{x1}(y) - y1 inside, ū_{x1}(y) outside.
  for (const Point& y : {Point{0.3, -0.2}, Point{0.7, 0.5}, Point{-0.1, 0.9}}) {
    CHECK(std::abs(gradient_volume_integral(x1, disk, y, 128) + 0.5 * y[0]) < 1e-10);
  }
  for (const Point& y : {Point{2.0, 0.0}, Point{1.1, 0.3}}) {
    CHECK(std::abs(gradient_volume_integral(x1, disk, y, 128) - circle_x1_layer(y)) < 1e-9);
  }
  try {
    (void)gradient_volume_integral(x1, disk, Point{0.0, 1.0}, 64);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Placement);
  }
}

TEST_CASE("boundary limit zeta") {
  const Domain disk = Domain::unit_ball(2);
  const ScalarField c = catalog_from_text("constant(2)", 2);
  CHECK(std::abs(boundary_limit_zeta(c, disk, Point{1.0, 0.0}, 64)) < 1e-12);
  const ScalarField x1 = catalog_from_text("coordinate(1)", 2);
  const Point z{1.0, 0.0};
  const double za = boundary_limit_zeta(x1, disk, z, 64, ZetaMode::Algebraic);
  const double zl = boundary_limit_zeta(x1, disk, z, 64, ZetaMode::Limit);
  CHECK(za == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(za - zl) < 1e-4);
  const ScalarField d = catalog_from_text("distance(0,0)", 2);
  const Point w{0.0, 1.0};
  CHECK(std::abs(boundary_limit_zeta(d, disk, w, 64, ZetaMode::Algebraic) -
                 boundary_limit_zeta(d, disk, w, 64, ZetaMode::Limit)) < 1e-4);
}

TEST_CASE("newtonian integrals") {
  const Domain disk = Domain::unit_ball(2);
  const NewtonianTerms h = newtonian_integrals(catalog_from_text("harmonic_poly(2)", 2), disk, Point{0.3, 0.1}, 64);
  CHECK(std::abs(h.volume_term) < 1e-8);
  const NewtonianTerms x1 = newtonian_integrals(catalog_from_text("coordinate(1)", 2), disk, Point{0.0, 0.0}, 64);
  CHECK(std::abs(x1.boundary_term) < 1e-8);
  // Δ|x|² = 4 and ∫_B ln|x|/(2π) dx = ∫_0^1 ρ ln ρ dρ = -1/4.
  const NewtonianTerms q = newtonian_integrals(catalog_from_text("quadratic_radial(0)", 2), disk, Point{0.0, 0.0}, 64);
  CHECK(std::abs(q.volume_term + 1.0) < 1e-10);
  // N = 3: Δ|x|² = 6 and ∫_B -1/(4π|x|) dx = -1/2.
  const NewtonianTerms q3 =
      newtonian_integrals(catalog_from_text("quadratic_radial(0)", 3), Domain::unit_ball(3), Point{0.0, 0.0, 0.0}, 32);
  CHECK(std::abs(q3.volume_term + 3.0) < 1e-10);
  ScalarField::Spec s;
  s.name = "nolap";
  s.value = [](const Point&) { return 0.0; };
  s.gradient = [](const Point& x) { return Point(x.dim()); };
  try {
    (void)newtonian_integrals(ScalarField(s), disk, Point{0.0, 0.0}, 32);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capability);
  }
}

TEST_CASE("Hölder sphere term scales like eps^alpha") {
  const ScalarField f = catalog_from_text("power_distance(0,0,0.5)", 2);
  const Point o{0.0, 0.0};
  const double e1 = 1e-2;
  const double e2 = 1e-4;
  const double s1 = holder_sphere_ratio(f, o, 0.5, e1);
  const double s2 = holder_sphere_ratio(f, o, 0.5, e2);
  CHECK(s1 == doctest::Approx(2 * kPi * std::sqrt(e1)).epsilon(1e-12));
  CHECK(std::abs(std::log(s1 / s2) / std::log(e1 / e2) - 0.5) < 0.1);
}
