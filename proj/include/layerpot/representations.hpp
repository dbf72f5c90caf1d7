#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layerpot/fields.hpp"
#include "layerpot/geometry.hpp"
#include "layerpot/potentials.hpp"

namespace layerpot {

enum class IdentityId {
  F1,
  FIG,
  MAT,
  COM,
  RP0,
  RP1,
  CERC,
  REP2,
  REP3,
  F2,
  F3,
  C2_EXTERIOR,
  GRR,
  GREEN_RIEMANN_INTERIOR,
  GREEN_RIEMANN_EXTERIOR,
  GREEN_RIEMANN_BOUNDARY,
};

const char* to_string(IdentityId id) noexcept;
std::optional<IdentityId> identity_from_string(std::string_view s);
std::span<const IdentityId> all_identities() noexcept;

struct IdentityReport {
  IdentityId id = IdentityId::F1;
  std::string field;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  int order = 0;
  std::vector<Point> points;
  bool pass = false;
  // Named pieces of the right-hand side, for diagnostics.
  std::vector<std::pair<std::string, double>> terms;
  std::string note;
};

// 1e-6 for smooth fields, 1e-4 for fields with singular points, 1e-3 for the
// double-integral identities F2 and F3.
double default_tolerance(IdentityId id, const ScalarField& f);

// f(y) = ū_f(y) - ∫_Ω ⟨∇E(x-y), ∇f(x)⟩ dx, y ∈ Ω.
IdentityReport check_f1(const ScalarField& f, const Domain& domain, const Point& y, int order,
                        std::optional<double> tolerance = std::nullopt);

// ∫_Ω f = (1/N) ∫_{∂Ω} f ⟨x-y, ν⟩ dσ - (1/N) ∫_Ω ⟨∇f, x-y⟩ dx, any y.
IdentityReport check_fig(const ScalarField& f, const Domain& domain, const Point& y, int order,
                         std::optional<double> tolerance = std::nullopt);

// MAT, COM and CERC at y ∈ B; REP2 and REP3 at the centre (y is ignored).
// REP2 is reported as (surface mean - f(a)) against its volume term and REP3
// as (volume mean - f(a)) against its correction integral.
IdentityReport check_ball_corollary(IdentityId which, const ScalarField& f, const Ball& ball, const Point& y,
                                    int order, std::optional<double> tolerance = std::nullopt);

// RP0 with arbitrary z, RP1 (z = y).
IdentityReport check_rp(IdentityId which, const ScalarField& f, const Domain& domain, const Point& y,
                        const Point& z, int order, std::optional<double> tolerance = std::nullopt);

struct F2F3Options {
  int outer_order = 32;
  int inner_order = 64;
  std::optional<Point> z;  // defaults to the domain centre
  ZetaMode zeta_mode = ZetaMode::Algebraic;
  std::optional<double> tolerance;
};

// Throws Budget when the nested quadrature would exceed the node budget.
std::pair<IdentityReport, IdentityReport> check_f2_f3(const ScalarField& f, const Domain& domain,
                                                      const F2F3Options& options = {});

// ū_f(y) = ∫_Ω ⟨∇E(x-y), ∇f(x)⟩ dx for y outside the closure; p ∈ [1, ∞].
IdentityReport check_c2_exterior(const ScalarField& f, const Domain& domain, const Point& y,
                                 const LebesgueExponent& p, int order,
                                 std::optional<double> tolerance = std::nullopt);

// Interior y: GRR and the interior Green–Riemann formula. Exterior y: GRR and
// the zero identity. Boundary y: the boundary formula f = 2ū_f - 2ζ.
std::vector<IdentityReport> check_grr_and_green_riemann(const ScalarField& f, const Domain& domain, const Point& y,
                                                        int order, ZetaMode zeta_mode = ZetaMode::Algebraic,
                                                        std::optional<double> tolerance = std::nullopt);

}  // namespace layerpot
