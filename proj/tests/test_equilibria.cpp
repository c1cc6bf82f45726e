#include <cmath>
#include <vector>

#include "doctest.h"
#include "hpax/equilibria.hpp"
#include "hpax/error.hpp"
#include "hpax/model.hpp"

using namespace hpax;

namespace {

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Params make_params(double A, double p2, double p3, double p4, double p5,
                   double p6) {
  Params p;
  p.A = A;
  p.p2 = p2;
  p.p3 = p3;
  p.p4 = p4;
  p.p5 = p5;
  p.p6 = p6;
  p.tau = 0.0;
  return p;
}

double rhs_norm(const Params& p, const State& y) {
  const State f = rhs(p, y, y.a);
  return std::max(std::fabs(f.a), std::max(std::fabs(f.r), std::fabs(f.o)));
}

} // namespace

TEST_CASE("generic equilibrium: reference parameter set A") {
  const Params p = make_params(1.0, 15.0, 7.2, 0.05, 0.11, 2.9);
  const Equilibrium eq = solve_equilibrium(p);
  CHECK(near(eq.r, 0.0380983878060969, 1e-10));
  CHECK(near(eq.a, 0.12933021094971, 1e-10));
  CHECK(near(eq.o, eq.a, 1e-12));
  CHECK(near(eq.K1, 1.68211703799508, 1e-9));
  CHECK(near(eq.K2, 0.0254650721781719, 1e-10));
  CHECK(near(eq.K3, 0.495521864367014, 1e-9));
  CHECK(near(eq.K4, 0.0075015589028266, 1e-10));
  CHECK(rhs_norm(p, eq.state()) < 1e-10);
}

TEST_CASE("quartic change of variables agrees with the bisection route") {
  const Params p = make_params(1.0, 15.0, 7.2, 0.05, 0.11, 2.9);
  const auto rs = solve_equilibrium_quartic(p);
  REQUIRE(rs.size() == 1);
  CHECK(near(rs[0], 0.0380983878060969, 1e-9));

  Params q = make_params(0.5, 2.0, 1.0, 0.3, 0.2, 1.5);
  const Equilibrium eq = solve_equilibrium(q);
  const auto rs2 = solve_equilibrium_quartic(q);
  REQUIRE(!rs2.empty());
  double best = 1e300;
  for (double r : rs2) best = std::min(best, std::fabs(r - eq.r));
  CHECK(best < 1e-9);
}

TEST_CASE("equilibrium reconstruction from a given r") {
  const Params p = make_params(1.0, 15.0, 7.2, 0.05, 0.11, 2.9);
  const Equilibrium eq = solve_equilibrium(p);
  const Equilibrium eq2 = equilibrium_from_r(p, eq.r);
  CHECK(near(eq2.a, eq.a, 1e-12));
  CHECK(near(eq2.K1, eq.K1, 1e-10));
  CHECK(near(eq2.K2, eq.K2, 1e-12));
  CHECK(near(eq2.K3, eq.K3, 1e-10));
  CHECK(near(eq2.K4, eq.K4, 1e-12));
}

TEST_CASE("equilibrium solver guards its domain") {
  CHECK_THROWS_AS(solve_equilibrium(make_params(0.0, 1, 1, 1, 1, 1)),
                  domain_error);
  CHECK_THROWS_AS(solve_equilibrium(make_params(1.0, 0, 1, 1, 1, 1)),
                  domain_error);
  CHECK_THROWS_AS(solve_equilibrium_quartic(make_params(1.0, 1, 1, 1, 1, 0)),
                  domain_error);
}

TEST_CASE("three coexisting equilibria: reference parameter set B") {
  const Params p = make_params(0.106, 0.0, 0.222, 0.464, 0.094, 0.418);
  const CaseReport rep = classify_case(p);
  CHECK(rep.id == CaseId::p2_zero);
  CHECK(rep.root_count == 3);
  REQUIRE(rep.fixed_points.size() == 3);

  const double r_expect[3] = {0.3961314300382849, 0.8313782627340212,
                              1.3897151876104696};
  const PointClass cls_expect[3] = {PointClass::stable_node, PointClass::saddle,
                                    PointClass::stable_node};
  const double k2_expect[3] = {0.335539247, 0.455257738, 0.359539015};
  for (int i = 0; i < 3; ++i) {
    CHECK(near(rep.fixed_points[i].point.r, r_expect[i], 1e-9));
    CHECK(near(rep.fixed_points[i].point.a, 0.4774774774774775, 1e-12));
    CHECK(near(rep.fixed_points[i].point.o, 0.4774774774774775, 1e-12));
    CHECK(rep.fixed_points[i].cls == cls_expect[i]);
    const Equilibrium eq = equilibrium_from_r(p, r_expect[i]);
    CHECK(near(eq.K2, k2_expect[i], 1e-8));
    CHECK(rhs_norm(p, rep.fixed_points[i].point) < 1e-9);
  }
  // Saddle has uptake gain above clearance, nodes below.
  CHECK(k2_expect[1] > p.p6);
  CHECK(k2_expect[0] < p.p6);
}

TEST_CASE("no axis feedback with a steep threshold leaves a single point") {
  const Params p = make_params(0.106, 0.0, 0.222, 100.0, 0.094, 0.418);
  const CaseReport rep = classify_case(p);
  CHECK(rep.id == CaseId::p2_zero);
  CHECK(rep.root_count == 1);
  REQUIRE(rep.fixed_points.size() == 1);
  CHECK(rep.fixed_points[0].cls == PointClass::stable_node);
}

TEST_CASE("zero-baseline branch grows two interior points") {
  const Params p = make_params(10.0, 0.5, 1.0, 1.0, 0.0, 0.5);
  const CaseReport rep = classify_case(p);
  CHECK(rep.id == CaseId::p5_zero);
  CHECK(rep.root_count == 2);
  REQUIRE(rep.fixed_points.size() == 3);
  // Boundary point sits on the r = 0 face.
  CHECK(near(rep.fixed_points[0].point.a, 10.0, 1e-12));
  CHECK(rep.fixed_points[0].point.r == 0.0);
  CHECK(near(rep.fixed_points[0].point.o, 10.0, 1e-12));
  for (const auto& fp : rep.fixed_points)
    CHECK(rhs_norm(p, fp.point) < 1e-7);
  // Interior roots of a^3 - 8.75 a^2 - 20 a + 100, ascending in a.
  CHECK(near(rep.fixed_points[1].point.a, 2.74174614305, 1e-8));
  CHECK(near(rep.fixed_points[2].point.a, 9.74933896674, 1e-8));
  CHECK(near(rep.fixed_points[1].point.r, 1.93111290817, 1e-8));
  CHECK(near(rep.fixed_points[2].point.r, 0.00527432006292, 1e-10));
}

TEST_CASE("saturated uptake branch has zero feedback slope") {
  const Params p = make_params(1.0, 2.0, 1.0, 0.0, 0.5, 2.0);
  const CaseReport rep = classify_case(p);
  CHECK(rep.id == CaseId::p4_zero);
  REQUIRE(rep.fixed_points.size() == 1);
  CHECK(near(rep.fixed_points[0].point.r, 0.75, 1e-12));
  // a solves 1.5 a^2 + a - 1 = 0.
  CHECK(near(rep.fixed_points[0].point.a, (-1.0 + std::sqrt(7.0)) / 3.0, 1e-9));
  const Equilibrium eq = equilibrium_from_r(p, 0.75);
  CHECK(eq.K2 == 0.0); // saturation kills the uptake slope
  CHECK(eq.K3 > 0.0);  // axis coupling survives
  CHECK(rhs_norm(p, rep.fixed_points[0].point) < 1e-9);
}

TEST_CASE("degenerate-case dispatch priorities") {
  // Zero drive wins over everything else.
  CHECK(classify_case(make_params(0, 1, 1, 1, 0, 0)).id == CaseId::A_zero);
  // Both r sinks off beats the p2/p4 split.
  CHECK(classify_case(make_params(1, 0, 1, 0, 0, 0)).id == CaseId::p6_p5_zero);
  CHECK(classify_case(make_params(1, 0, 1, 0, 0.5, 2)).id ==
        CaseId::p2_p4_zero);
  CHECK(classify_case(make_params(1, 2, 1, 1, 0.5, 0)).id == CaseId::p6_zero);
  CHECK(classify_case(make_params(1, 2, 0, 1, 0.5, 2)).id == CaseId::p3_zero);
  CHECK(classify_case(make_params(1, 2, 1, 1, 0.5, 2)).id == CaseId::generic);
}

TEST_CASE("zero-drive case details") {
  {
    const CaseReport rep = classify_case(make_params(0, 1, 2, 1, 0.6, 3));
    REQUIRE(rep.fixed_points.size() == 1);
    CHECK(near(rep.fixed_points[0].point.r, 0.2, 1e-15));
    CHECK(rep.fixed_points[0].point.a == 0.0);
    CHECK(rep.fixed_points[0].cls == PointClass::stable_node);
    CHECK(rep.overall == PointClass::stable_node);
  }
  {
    // No a clearance: marginal direction.
    const CaseReport rep = classify_case(make_params(0, 1, 0, 1, 0.6, 3));
    CHECK(rep.overall == PointClass::non_hyperbolic);
  }
  {
    // No r clearance and positive baseline: r drifts off to infinity.
    const CaseReport rep = classify_case(make_params(0, 1, 2, 1, 0.6, 0));
    CHECK(rep.unbounded_equilibrium);
    CHECK(rep.overall == PointClass::blow_up);
  }
}

TEST_CASE("no-clearance cases flag unbounded behaviour") {
  {
    const CaseReport rep = classify_case(make_params(1, 2, 1, 1, 0.5, 0), 0.5);
    CHECK(rep.id == CaseId::p6_zero);
    CHECK(rep.unbounded_equilibrium);
    CHECK(rep.overall == PointClass::blow_up);
    REQUIRE(rep.blow_up_time.has_value());
    CHECK(near(*rep.blow_up_time, 2.0, 1e-12));
  }
  {
    const CaseReport rep = classify_case(make_params(1, 2, 1, 1, 0, 0), 1.0);
    CHECK(rep.id == CaseId::p6_p5_zero);
    REQUIRE(rep.fixed_points.size() == 1);
    CHECK(near(rep.fixed_points[0].point.a, 1.0, 1e-12));
    CHECK(rep.fixed_points[0].point.r == 0.0);
    REQUIRE(rep.blow_up_time.has_value());
    CHECK(near(*rep.blow_up_time, 1.0, 1e-12));
  }
  {
    const CaseReport rep = classify_case(make_params(1, 2, 0, 1, 0.5, 2));
    CHECK(rep.unbounded_equilibrium);
    CHECK(rep.overall == PointClass::non_hyperbolic);
  }
}

TEST_CASE("explicit-solution case reports its fixed point") {
  const CaseReport rep = classify_case(make_params(1, 0, 2, 0, 0.3, 1.1));
  CHECK(rep.id == CaseId::p2_p4_zero);
  CHECK(rep.overall == PointClass::explicit_solution);
  REQUIRE(rep.fixed_points.size() == 1);
  CHECK(near(rep.fixed_points[0].point.a, 0.5, 1e-15));
  CHECK(near(rep.fixed_points[0].point.r, 1.3 / 1.1, 1e-15));
}

TEST_CASE("finite-time divergence estimate") {
  CHECK(near(blow_up_estimate(make_params(1, 0, 1, 1, 0, 0), 1.0), 1.0, 1e-15));
  CHECK(near(blow_up_estimate(make_params(2, 0, 1, 1, 0, 0), 1.0), 0.25,
             1e-15));
  CHECK(near(blow_up_estimate(make_params(1, 0, 1, 1, 0, 0), 0.5), 2.0, 1e-15));
  CHECK_THROWS_AS(blow_up_estimate(make_params(1, 0, 1, 1, 0, 1), 1.0),
                  domain_error);
  CHECK_THROWS_AS(blow_up_estimate(make_params(1, 0, 1, 1, 0, 0), 0.0),
                  domain_error);
}

TEST_CASE("analytic jacobian matches central differences") {
  const Params p = make_params(1.0, 15.0, 7.2, 0.05, 0.11, 2.9);
  const Equilibrium eq = solve_equilibrium(p);
  const auto J = jacobian(p, eq);
  const auto F = fd_jacobian(p, eq);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(near(J[i][j], F[i][j], 1e-6));
  // Structural zeros and the delay row.
  CHECK(J[1][0] == 0.0);
  CHECK(J[2][0] == 1.0);
  CHECK(J[2][1] == 0.0);
  CHECK(J[2][2] == -1.0);
}
