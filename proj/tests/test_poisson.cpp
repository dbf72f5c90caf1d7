#include <doctest.h>

#include <cmath>

#include "layerpot/errors.hpp"
#include "layerpot/poisson.hpp"

using namespace layerpot;

TEST_CASE("poisson reproduces harmonic data") {
  const Ball disk(Point{0.0, 0.0}, 1.0);
  CHECK(poisson_evaluate(disk, [](const Point&) { return 3.5; }, Point{0.4, -0.2}, 64) ==
        doctest::Approx(3.5).epsilon(1e-13));
  CHECK(poisson_evaluate(disk, [](const Point& x) { return x[0]; }, Point{0.3, 0.2}, 64) ==
        doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(poisson_evaluate(disk, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; }, Point{0.5, 0.0}, 64) -
                 0.25) < 1e-12);
  // Shifted ball in 3-D: u = x3 - a3 is harmonic.
  const Ball b3(Point{1.0, -1.0, 2.0}, 2.0);
  CHECK(std::abs(poisson_evaluate(b3, [](const Point& x) { return x[2] - 2.0; }, Point{1.5, -0.5, 2.8}, 48) - 0.8) <
        1e-10);
}

TEST_CASE("poisson kernel mass") {
  const Ball disk(Point{0.0, 0.0}, 1.0);
  for (double r : {0.0, 0.3, 0.6, 0.8}) {
    CHECK(std::abs(poisson_kernel_mass(disk, Point{r * std::cos(1.0), r * std::sin(1.0)}, 128) - 1.0) < 1e-9);
  }
  // Escalation keeps 0.95 R resolved.
  CHECK(std::abs(poisson_kernel_mass(disk, Point{0.95, 0.0}, 64) - 1.0) < 1e-9);
  const Ball ball(Point{0.0, 0.0, 0.0}, 1.0);
  CHECK(std::abs(poisson_kernel_mass(ball, Point{0.0, 0.5, 0.5}, 64) - 1.0) < 1e-9);
}

TEST_CASE("poisson target outside 0.95 R") {
  const Ball disk(Point{0.0, 0.0}, 1.0);
  try {
    (void)poisson_evaluate(disk, [](const Point&) { return 1.0; }, Point{0.97, 0.0}, 64);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("mean values of harmonic fields") {
  const Ball disk(Point{0.2, 0.1}, 0.5);
  const MeanValues m = mean_value_check(catalog_from_text("harmonic_poly(3)", 2), disk);
  CHECK(std::abs(m.surface_mean - m.center_value) < 1e-12);
  CHECK(std::abs(m.volume_mean - m.center_value) < 1e-12);
  try {
    (void)mean_value_check(catalog_from_text("distance(0.3,0.1)", 2), disk);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Placement);
  }
}

TEST_CASE("dirichlet chi") {
  const Ball disk(Point{0.0, 0.0}, 1.0);
  // f = |x|² has trace 1, so χ ≡ 1.
  const DirichletSolution chi = dirichlet_chi(disk, catalog_from_text("quadratic_radial(0)", 2), 64);
  CHECK(std::abs(chi(Point{0.5, 0.5}) - 1.0) < 1e-12);
  CHECK(chi.boundary_values().size() == 64);
  // Harmonic f is its own extension.
  const ScalarField h = catalog_from_text("harmonic_poly(2)", 2);
  const DirichletSolution hc = dirichlet_chi(disk, h, 64);
  CHECK(std::abs(hc(Point{0.6, -0.3}) - h(Point{0.6, -0.3})) < 1e-12);
}
