#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"

using namespace layerpot;
constexpr double kPi = std::numbers::pi;

TEST_CASE("sphere area constant") {
  CHECK(sphere_area_constant(2) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(sphere_area_constant(3) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(sphere_area_constant(4) == doctest::Approx(2 * kPi * kPi).epsilon(1e-15));
  CHECK(sphere_area_constant(5) == doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_area_constant(1), Error);
}

TEST_CASE("gamma function") {
  CHECK(gamma_function(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
  CHECK(gamma_function(5.0) == doctest::Approx(24.0).epsilon(1e-15));
  for (double s : {0.1, 0.7, 1.3, 2.9, 7.25, 33.3, -0.5, -2.5}) {
    CHECK(std::abs(gamma_function(s) / std::tgamma(s) - 1.0) < 1e-13);
  }
  CHECK_THROWS_AS(gamma_function(-3.0), Error);
}

TEST_CASE("fundamental solution values") {
  CHECK(fundamental_solution(Point{0.6, 0.8}) == doctest::Approx(0.0));
  CHECK(fundamental_solution(Point{std::numbers::e, 0.0}) == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-15));
  CHECK(fundamental_solution(Point{0.0, 1.0, 0.0}) == doctest::Approx(-1.0 / (4 * kPi)).epsilon(1e-15));
  try {
    (void)fundamental_solution(Point{0.0, 0.0});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singularity);
  }
}

TEST_CASE("gradient and normal derivative") {
  const Point g2 = grad_fundamental_solution(Point{1.0, 0.0});
  CHECK(g2[0] == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-15));
  CHECK(g2[1] == 0.0);
  const Point g3 = grad_fundamental_solution(Point{0.0, 0.0, 2.0});
  CHECK(g3[2] == doctest::Approx(1.0 / (16 * kPi)).epsilon(1e-15));
  const Point x{0.3, -0.7, 0.2};
  CHECK(distance(grad_fundamental_solution(-x), -grad_fundamental_solution(x)) < 1e-16);
  CHECK(normal_derivative_fundamental_solution(Point{1.0, 0.0}, Point{0.0, 1.0}) == 0.0);
  CHECK(normal_derivative_fundamental_solution(Point{2.0, 0.0}, Point{1.0, 0.0}) ==
        doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-15));
  // Boundary point of a ball seen from its centre: 1/(ω_N R^{N-1}).
  const double R = 1.7;
  CHECK(normal_derivative_fundamental_solution(Point{0.0, 0.0, R}, Point{0.0, 0.0, 1.0}) ==
        doctest::Approx(1.0 / (4 * kPi * R * R)).epsilon(1e-15));
  CHECK_THROWS_AS(normal_derivative_fundamental_solution(Point{1.0, 0.0}, Point{2.0, 0.0}), Error);
}

TEST_CASE("harmonicity and gradient consistency by finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int dim : {2, 3}) {
    for (int k = 0; k < 20; ++k) {
      Point x(dim);
      do {
        for (int i = 0; i < dim; ++i) x[i] = 2.0 * u(rng);
      } while (x.norm() < 0.5 || x.norm() > 2.0);
      const double h = 1e-3;
      double lap = -2.0 * dim * fundamental_solution(x);
      const Point g = grad_fundamental_solution(x);
      for (int i = 0; i < dim; ++i) {
        Point xp = x;
        Point xm = x;
        xp[i] += h;
        xm[i] -= h;
        lap += fundamental_solution(xp) + fundamental_solution(xm);
        const double hd = 1e-5;
        Point yp = x;
        Point ym = x;
        yp[i] += hd;
        ym[i] -= hd;
        CHECK(std::abs((fundamental_solution(yp) - fundamental_solution(ym)) / (2 * hd) - g[i]) < 1e-6);
      }
      CHECK(std::abs(lap / (h * h)) < 1e-4);
    }
  }
}

TEST_CASE("scaling laws") {
  const Point x{0.3, 0.4, 1.2};
  CHECK(fundamental_solution(x * 3.0) == doctest::Approx(fundamental_solution(x) / 3.0).epsilon(1e-14));
  const Point y{0.3, 0.4};
  CHECK(fundamental_solution(y * 2.5) ==
        doctest::Approx(fundamental_solution(y) + std::log(2.5) / (2 * kPi)).epsilon(1e-14));
}
