#include <cmath>

#include "doctest.h"
#include "hpax/equilibria.hpp"
#include "hpax/error.hpp"
#include "hpax/lyapunov.hpp"

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

Equilibrium origin_eq() {
  Equilibrium eq{};
  return eq;
}

} // namespace

TEST_CASE("energy distance basics") {
  Equilibrium eq{};
  eq.a = 0.2;
  eq.r = 0.5;
  eq.o = 0.2;
  CHECK(lyapunov_value(eq, eq.state()) == 0.0);
  State y = eq.state();
  y.a += 1.0; // only the a term moves: W = 1/2
  CHECK(near(lyapunov_value(eq, y), 0.5, 1e-15));
  y = eq.state();
  y.o += 1.0; // o moves and drags the product term
  const double ds = (eq.o + 1.0) * eq.r - eq.o * eq.r;
  CHECK(near(lyapunov_value(eq, y), 0.5 * (1.0 + ds * ds), 1e-15));
}

TEST_CASE("certificate constants: small-threshold fixture") {
  const Params p = make_params(0.01, 0.1, 2.0, 1.0, 0.5, 2.0);
  const Equilibrium eq = solve_equilibrium(p);
  CHECK(near(eq.r, 0.250000781, 1e-8));
  CHECK(near(eq.a, 0.00499937515, 1e-9));

  const LyapunovReport rep = lyapunov_constants(p, eq);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.condition_ok);
  CHECK(rep.applicable);
  CHECK(!rep.min_at_p6);
  CHECK(near(rep.minv, 1.0, 1e-15));
  CHECK(near(rep.alpha, 1.45800342, 1e-7));
  CHECK(near(rep.beta, 8.49588667, 1e-7));
  CHECK(near(rep.gamma, 0.00499938296, 1e-9));
  CHECK(near(rep.basin, 0.0294450275, 1e-8));
  CHECK(near(rep.B, 0.25, 1e-12));
  CHECK(!rep.large_p4_branch);
  CHECK(!rep.A0.has_value());
  // Amplitude map minimum sits far above the admissible bound here.
  REQUIRE(rep.A_min.has_value());
  REQUIRE(rep.F_min.has_value());
  CHECK(*rep.F_min > rep.B);
  CHECK(!rep.A1.has_value());
  CHECK(!rep.A2.has_value());
  CHECK(near(*rep.F_min, lyapunov_F(p, *rep.A_min), 1e-10));
  // Local minimality of the located amplitude.
  CHECK(*rep.F_min <= lyapunov_F(p, *rep.A_min * 1.001) + 1e-12);
  CHECK(*rep.F_min <= lyapunov_F(p, *rep.A_min * 0.999) + 1e-12);
  // The quadratic coefficient respects both closed-form caps.
  CHECK(rep.gamma <= rep.gamma_cap_corrected);
  CHECK(near(rep.gamma_cap_corrected, 2.0, 1e-12)); // threshold term dominates
  CHECK(near(rep.gamma_cap_printed, 2.0, 1e-12));
}

TEST_CASE("certificate constants: steep-threshold fixture") {
  const Params p = make_params(0.05, 0.2, 2.0, 100.0, 0.1, 2.0);
  const Equilibrium eq = solve_equilibrium(p);
  const LyapunovReport rep = lyapunov_constants(p, eq);
  CHECK(rep.applicable);
  CHECK(near(rep.alpha, 1.72993749, 1e-7));
  CHECK(near(rep.beta, 8.48538741, 1e-7));
  CHECK(near(rep.gamma, 4.99875133e-5, 1e-12));
  CHECK(near(rep.basin, 0.041563913, 1e-8));
  CHECK(near(rep.B, 0.45, 1e-12));
  CHECK(rep.large_p4_branch);
  REQUIRE(rep.A0.has_value());
  CHECK(near(*rep.A0, 0.147059, 1e-6));
  CHECK(!rep.A_min.has_value());
  CHECK(rep.gamma <= rep.gamma_cap_corrected);
}

TEST_CASE("certificate constants: zero quadratic coefficient") {
  const Params p = make_params(0.0, 0.0, 2.0, 1.0, 0.1, 3.0);
  Equilibrium eq = origin_eq();
  eq.r = 0.1 / 3.0;
  const LyapunovReport rep = lyapunov_constants(p, eq);
  CHECK(rep.applicable);
  CHECK(near(rep.alpha, 1.93333333, 1e-7));
  CHECK(near(rep.beta, 11.3137085, 1e-6));
  CHECK(rep.gamma == 0.0);
  CHECK(near(rep.basin, 0.0292013889, 1e-9)); // (alpha/beta)^2 fallback
}

TEST_CASE("closed-form caps with a dominant product term") {
  const Params p = make_params(10.0, 1.0, 4.0, 1e-4, 1.0, 1.0);
  const Equilibrium eq = solve_equilibrium(p);
  const LyapunovReport rep = lyapunov_constants(p, eq);
  CHECK(near(rep.gamma_cap_corrected, 4.0 * 4.0 * (std::sqrt(11.0) + 1.0) / 20.0,
             1e-12));
  CHECK(near(rep.gamma_cap_printed, 4.0 * (std::sqrt(41.0) + 1.0) / 20.0,
             1e-12));
  CHECK(rep.gamma_cap_corrected > rep.gamma_cap_printed); // p3 > 1 widens it
  CHECK(rep.gamma <= rep.gamma_cap_corrected);
}

TEST_CASE("amplitude map closed form and guards") {
  const Params p = make_params(0.0, 0.0, 2.0, 1.0, 0.1, 3.0);
  // p2 = 0 collapses the map to 2 A + 120 / A.
  CHECK(near(lyapunov_F(p, 5.0), 2.0 * 5.0 + 120.0 / 5.0, 1e-12));
  CHECK(near(lyapunov_F(p, std::sqrt(60.0)), 4.0 * std::sqrt(60.0), 1e-10));
  CHECK_THROWS_AS(lyapunov_F(p, 0.0), domain_error);
  CHECK_THROWS_AS(lyapunov_F(make_params(1, 1, 2, 1, 0.0, 3), 1.0),
                  domain_error);
}

TEST_CASE("hypothesis bookkeeping") {
  {
    // Slow a clearance breaks the premises outright.
    const Params p = make_params(1.5, 1.8, 0.2, 5.0, 0.11, 0.9);
    const LyapunovReport rep = lyapunov_constants(p, solve_equilibrium(p));
    CHECK(!rep.hypotheses_ok);
    CHECK(!rep.applicable);
  }
  {
    // Minimum attained at p6 but then p6 > 1/minv is impossible.
    const Params p = make_params(0.0, 0.0, 2.0, 1.0, 0.0, 0.8);
    const LyapunovReport rep = lyapunov_constants(p, origin_eq());
    CHECK(rep.min_at_p6);
    CHECK(near(rep.minv, 0.8, 1e-15));
    CHECK(!rep.hypotheses_ok);
  }
  {
    // Baseline at the admissibility edge: p5 = p6*minv - 1 exactly.
    const Params p = make_params(0.0, 0.0, 2.0, 1.0, 1.0, 2.0);
    const LyapunovReport rep = lyapunov_constants(p, origin_eq());
    CHECK(!rep.hypotheses_ok);
  }
}

TEST_CASE("decay audit: small-threshold fixture") {
  const Params p = make_params(0.01, 0.1, 2.0, 1.0, 0.5, 2.0);
  const Equilibrium eq = solve_equilibrium(p);
  State y0 = eq.state();
  y0.a += 0.05;
  y0.r += 0.03;
  y0.o += 0.04;
  const DecayReport rep = verify_decay(p, eq, y0);
  CHECK(near(rep.w0, 0.00256441139181, 1e-12));
  CHECK(rep.converged);
  CHECK(rep.monotone);
  CHECK(rep.inequality_ok);
  CHECK(rep.w_final < 1e-18);
  CHECK(rep.max_inequality_gap < 1e-12);
}

TEST_CASE("decay audit: zero-gamma corner overshoots the bound") {
  // The trajectory itself contracts monotonically, but the cubic upper
  // bound with the sharpened linear coefficient is genuinely violated by
  // a few 1e-5 along the tail at this corner. The report says so.
  const Params p = make_params(0.0, 0.0, 2.0, 1.0, 0.1, 3.0);
  Equilibrium eq = origin_eq();
  eq.r = 0.1 / 3.0;
  State y0;
  y0.a = 0.05;
  y0.r = eq.r + 0.03;
  y0.o = 0.04;
  const DecayReport rep = verify_decay(p, eq, y0);
  CHECK(near(rep.w0, 0.00250320888889, 1e-12));
  CHECK(rep.converged);
  CHECK(rep.monotone);
  CHECK(!rep.inequality_ok);
  CHECK(rep.max_inequality_gap > 2.3e-5);
  CHECK(rep.max_inequality_gap < 2.7e-5);
}

TEST_CASE("decay audit guards") {
  const Params p = make_params(0.01, 0.1, 2.0, 1.0, 0.5, 2.0);
  const Equilibrium eq = solve_equilibrium(p);
  State far = eq.state();
  far.a += 0.5; // W = 0.125 >> basin
  CHECK_THROWS_AS(verify_decay(p, eq, far), domain_error);

  const Params bad = make_params(1.5, 1.8, 0.2, 5.0, 0.11, 0.9);
  const Equilibrium eqb = solve_equilibrium(bad);
  CHECK_THROWS_AS(verify_decay(bad, eqb, eqb.state()), domain_error);
}
