#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "layerpot/fields.hpp"
#include "layerpot/geometry.hpp"

namespace layerpot {

struct BoundReport {
  std::string kind;   // "general", "ball" or "1d-inf" / "1d-q" / "1d-1"
  std::string field;
  double deviation = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // deviation / bound, 0 when both vanish
  double p = 0.0;      // +inf for p = ∞
  double p_conjugate = 0.0;
  std::optional<double> radius;
  std::string domain;
  Point y;
  int order = 0;
};

// ω_N R^{N-(N-1)p'} / (N-(N-1)p') = ∫_{B_R(y)} |x-y|^{-(N-1)p'} dx.
// Integrability error unless (N-1)p' < N.
double moment_integral_closed_form(int dim, double radius, double p_conjugate);

// ∫_Ω |x-y|^{-(N-1)p'} dx: the closed form when Ω is a ball centred at y,
// polar quadrature about y otherwise.
double moment_integral(const Domain& domain, const Point& y, double p_conjugate, int order);

// The same integral by polar quadrature about y, even for a centred ball.
double moment_integral_quadrature(const Domain& domain, const Point& y, double p_conjugate, int order);

// ω_N^{1/p'-1} (R^{N-(N-1)p'} / (N-(N-1)p'))^{1/p'}
double ball_constant(int dim, double radius, const LebesgueExponent& p);

// |f(y) - ū_f(y)| against ‖∇f‖_p / ω_N · (∫_Ω |x-y|^{-(N-1)p'} dx)^{1/p'}.
// Exponent error unless p > N.
BoundReport ostrowski_bound_general(const ScalarField& f, const Domain& domain, const Point& y,
                                    const LebesgueExponent& p, int order);

// |f(a) - surface mean of f over ∂B| against ball_constant · ‖∇f‖_{L^p(B)}.
BoundReport ostrowski_bound_ball(const ScalarField& f, const Ball& ball, const LebesgueExponent& p, int order);

// ---------------------------------------------------------------------------
// One-dimensional oracle on [a, b]; shares no quadrature with the N-D code.

struct Function1D {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

// poly(c0, c1, ...)  sin(k)  exp(k)
Function1D function1d_from_text(std::string_view text);

class Montgomery1D {
 public:
  Montgomery1D(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  // t - a on [a, x], t - b on (x, b].
  double kernel(double t, double x) const;

 private:
  double a_;
  double b_;
};

struct Montgomery1DReport {
  double lhs = 0.0;  // f(x)
  double rhs = 0.0;  // mean of f + (1/(b-a)) ∫ p(t,x) f'(t) dt
  double residual = 0.0;
  double deviation = 0.0;  // D(f; x) = f(x) - mean of f
};

// Range error unless a <= x <= b. `nodes` Gauss–Legendre points per side of x.
Montgomery1DReport montgomery_identity_1d(const Function1D& f, double a, double b, double x, int nodes = 32);

enum class Norm1D { Infinity, Q, One };

// |D(f; x)| against the ∞-, q- or 1-branch of the classical Ostrowski
// inequality. The q-branch needs q > 1; its Hölder partner is p = q/(q-1).
BoundReport ostrowski_bounds_1d(const Function1D& f, double a, double b, double x, Norm1D norm,
                                double q = 2.0);

}  // namespace layerpot
