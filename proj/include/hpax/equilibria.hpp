#pragma once
#include <array>
#include <optional>
#include <vector>

#include "hpax/model.hpp"

namespace hpax {

struct Equilibrium {
  double a = 0, r = 0, o = 0;
  double K1 = 0, K2 = 0, K3 = 0, K4 = 0;
  State state() const { return {a, r, o}; }
};

// Unique interior equilibrium for A > 0 and p2..p6 > 0: bisection to 1e-13 on
// the squared-product nullcline gap over (p5/p6, (p5+1)/p6), then three Newton
// polish steps. Linearization coefficients are filled from both closed forms
// and cross-checked.
Equilibrium solve_equilibrium(const Params& p);

// Alternate route: real nonnegative roots z of
//   z^4 + 2 z^3 + C1 z^2 + C2 z - C3 = 0,  r = p3 z (z + 2) / (4 p2 A).
// Returns the admissible r values (ascending).
std::vector<double> solve_equilibrium_quartic(const Params& p);

// Equilibrium at a prescribed r on nullcline 1 (a = o from the axis balance),
// with K coefficients; used by both routes and the degenerate cases.
Equilibrium equilibrium_from_r(const Params& p, double r);

// Jacobian of the tau = 0 field at an equilibrium: analytic closed form and a
// central finite-difference check (step h).
std::array<std::array<double, 3>, 3> jacobian(const Params& p, const Equilibrium& eq);
std::array<std::array<double, 3>, 3> fd_jacobian(const Params& p, const Equilibrium& eq,
                                                 double h = 1e-6);

enum class CaseId {
  generic,
  A_zero,
  p2_zero,
  p3_zero,
  p4_zero,
  p2_p4_zero,
  p5_zero,
  p6_p5_zero,
  p6_zero,
};

enum class PointClass {
  stable_node,
  saddle,
  non_hyperbolic,
  blow_up,
  explicit_solution,
};

struct CasePoint {
  State point;
  PointClass cls;
};

struct CaseReport {
  CaseId id = CaseId::generic;
  std::vector<CasePoint> fixed_points;
  int root_count = 0;                 // admissible branch-equation roots
  bool unbounded_equilibrium = false; // a or r escapes to infinity
  std::optional<PointClass> overall;  // case-level behaviour label
  std::optional<double> blow_up_time; // finite-time estimate when applicable
};

// Degenerate-parameter dispatch. Priority (most degenerate first): A = 0;
// p5 = p6 = 0; p2 = p4 = 0; then single zeros in the order p6, p5, p4, p3,
// p2; otherwise generic. `r0` feeds the finite-time estimate where one exists.
CaseReport classify_case(const Params& p, std::optional<double> r0 = std::nullopt);

// T* = (p4 / r0) (p3 / A)^2. Requires p6 = 0, r0 > 0, A > 0, p4 > 0.
double blow_up_estimate(const Params& p, double r0);

}  // namespace hpax
