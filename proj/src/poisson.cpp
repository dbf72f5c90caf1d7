#include "layerpot/poisson.hpp"

#include <cmath>

#include "layerpot/errors.hpp"
#include "layerpot/kernel.hpp"
#include "layerpot/potentials.hpp"

namespace layerpot {

namespace {

void require_poisson_target(const Ball& ball, const Point& y) {
  require_same_dim(y, ball.center(), "poisson_evaluate");
  const double r = distance(y, ball.center());
  if (!(r <= kPoissonRadiusFraction * ball.radius())) {
    fail(ErrorKind::Domain, "Poisson evaluation needs |y-a| <= 0.95 R; got |y-a|/R = " +
                                std::to_string(r / ball.radius()));
  }
}

double inverse_power(double r, int n) {
  double rn = r;
  for (int i = 1; i < n; ++i) rn *= r;
  return 1.0 / rn;
}

double poisson_sum(const Ball& ball, const BoundaryQuadrature& q, const BoundaryData& phi, const Point& y) {
  const int n = ball.dim();
  const double R = ball.radius();
  Accumulator acc;
  for (std::size_t i = 0; i < q.size(); ++i) acc.add(q.weights[i] * phi(q.nodes[i]) * inverse_power(distance(q.nodes[i], y), n));
  const double rel = distance(y, ball.center());
  return (R * R - rel * rel) / (R * sphere_area_constant(n)) * acc.value();
}

}  // namespace

double poisson_evaluate(const Ball& ball, const BoundaryData& phi, const Point& y, int order) {
  require_poisson_target(ball, y);
  return poisson_sum(ball, resolved_boundary_rule(Domain(ball), y, order).rule, phi, y);
}

double poisson_kernel_mass(const Ball& ball, const Point& y, int order) {
  return poisson_evaluate(ball, [](const Point&) { return 1.0; }, y, order);
}

MeanValues mean_value_check(const ScalarField& u, const Ball& ball, int order) {
  for (const Point& a : u.singular_points()) {
    if (a.dim() == ball.dim() && distance(a, ball.center()) <= ball.radius() * (1.0 + 1e-12)) {
      fail(ErrorKind::Placement, u.name() + ": singular point " + a.to_string() + " lies in the closed ball");
    }
  }
  const Domain d(ball);
  MeanValues m;
  const BoundaryQuadrature bq = boundary_rule(d, order);
  Accumulator s;
  for (std::size_t i = 0; i < bq.size(); ++i) s.add(bq.weights[i] * u(bq.nodes[i]));
  m.surface_mean = s.value() / d.surface_measure();
  m.volume_mean = volume_rule(d, order, VolumeMode::Regular).integrate([&](const Point& x) { return u(x); }) / d.volume();
  m.center_value = u(ball.center());
  return m;
}

DirichletSolution::DirichletSolution(Ball ball, const BoundaryData& phi, int order)
    : ball_(std::move(ball)), order_(order), phi_(phi) {
  const BoundaryQuadrature rule = boundary_rule(Domain(ball_), order);
  values_.reserve(rule.size());
  for (const Point& x : rule.nodes) values_.push_back(phi(x));
}

double DirichletSolution::evaluate(const Point& y) const { return poisson_evaluate(ball_, phi_, y, order_); }

DirichletSolution dirichlet_chi(const Ball& ball, const ScalarField& f, int order) {
  return DirichletSolution(ball, [f](const Point& x) { return f(x); }, order);
}

}  // namespace layerpot
