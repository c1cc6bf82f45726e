#include <cmath>
#include <vector>

#include "doctest.h"
#include "hpax/equilibria.hpp"
#include "hpax/error.hpp"
#include "hpax/integrate.hpp"
#include "hpax/model.hpp"

using namespace hpax;

namespace {

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Params make_params(double A, double p2, double p3, double p4, double p5,
                   double p6, double tau = 0.0) {
  Params p;
  p.A = A;
  p.p2 = p2;
  p.p3 = p3;
  p.p4 = p4;
  p.p5 = p5;
  p.p6 = p6;
  p.tau = tau;
  return p;
}

State make_state(double a, double r, double o) {
  State y;
  y.a = a;
  y.r = r;
  y.o = o;
  return y;
}

double max_state_diff(const State& x, const State& y) {
  return std::max(std::fabs(x.a - y.a),
                  std::max(std::fabs(x.r - y.r), std::fabs(x.o - y.o)));
}

// Max nodal error against the closed-form solution.
double closed_form_error(const Params& p, const State& y0, double t_end,
                         double dt) {
  const Trajectory tr = integrate_ode(p, y0, t_end, dt);
  double err = 0.0;
  for (size_t i = 0; i < tr.t.size(); ++i)
    err = std::max(err,
                   max_state_diff(tr.y[i], explicit_case_solution(p, y0, tr.t[i])));
  return err;
}

} // namespace

TEST_CASE("fixed-step solver honors the grid contract") {
  const Params p = make_params(1, 2, 1, 1, 0.5, 2);
  const Trajectory tr = integrate_ode(p, make_state(0.3, 0.4, 0.3), 1.0, 0.3);
  REQUIRE(tr.t.size() == 5); // ceil(1/0.3) = 4 steps
  CHECK(near(tr.t[1], 0.25, 1e-15));
  CHECK(near(tr.t.back(), 1.0, 1e-15));
  CHECK(tr.dy.size() == tr.t.size());
  // Stored derivatives are the vector field at the nodes.
  const State f = rhs(p, tr.y[2], tr.y[2].a);
  CHECK(near(tr.dy[2].a, f.a, 1e-15));
  CHECK(near(tr.dy[2].r, f.r, 1e-15));
}

TEST_CASE("solver input guards") {
  const Params p = make_params(1, 2, 1, 1, 0.5, 2);
  const State y = make_state(0.3, 0.4, 0.3);
  CHECK_THROWS_AS(integrate_ode(p, y, 0.0, 0.1), invalid_argument_error);
  CHECK_THROWS_AS(integrate_ode(p, y, 1.0, 0.0), invalid_argument_error);
  CHECK_THROWS_AS(integrate_ode(p, make_state(-0.1, 0.4, 0.3), 1, 0.1),
                  domain_error);
  CHECK_THROWS_AS(integrate_ode(p, make_state(0.1, -0.4, 0.3), 1, 0.1),
                  domain_error);
  CHECK_THROWS_AS(integrate_ode(p, make_state(0.1, 0.4, 0.0), 1, 0.1),
                  domain_error);
  // r = 0 is a valid face of the domain.
  CHECK_NOTHROW(integrate_ode(make_params(1, 2, 1, 1, 0, 0),
                              make_state(0.1, 0.0, 0.3), 1, 0.1));
}

TEST_CASE("closed form, decoupled case: fourth-order convergence") {
  const Params p = make_params(1, 0, 2, 0, 0.3, 1.1);
  const State y0 = make_state(2.0, 0.7, 2.0);
  CHECK(closed_form_error(p, y0, 10.0, 1e-3) < 1e-12);
  const double e1 = closed_form_error(p, y0, 10.0, 0.1);
  const double e2 = closed_form_error(p, y0, 10.0, 0.05);
  CHECK(e1 / e2 > 12.8);
  CHECK(e1 / e2 < 19.2);
}

TEST_CASE("closed form survives the resonant clearance rate") {
  const Params p = make_params(1, 0, 1, 0, 0.3, 1.1); // p3 = 1 resonance
  const State y0 = make_state(2.0, 0.7, 2.0);
  CHECK(closed_form_error(p, y0, 10.0, 1e-3) < 1e-12);
}

TEST_CASE("closed form, flat-r face") {
  const Params p = make_params(1, 3, 2, 1, 0, 0);
  const State y0 = make_state(2.0, 0.0, 2.0);
  const Trajectory tr = integrate_ode(p, y0, 10.0, 1e-3);
  for (const auto& y : tr.y) CHECK(y.r == 0.0); // face is exactly invariant
  CHECK(closed_form_error(p, y0, 10.0, 1e-3) < 1e-10);
  // Off the face (or off the case) there is no closed form.
  CHECK_THROWS_AS(explicit_case_solution(p, make_state(2, 0.5, 2), 1.0),
                  unsupported_case);
  CHECK_THROWS_AS(
      explicit_case_solution(make_params(1, 2, 1, 1, 0.5, 2), y0, 1.0),
      unsupported_case);
}

TEST_CASE("dense evaluation is consistent with the nodes") {
  const Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9);
  const Trajectory tr = integrate_ode(p, make_state(0.3, 0.2, 0.3), 2.0, 0.01);
  CHECK(near(max_state_diff(tr.at(tr.t[37]), tr.y[37]), 0.0, 1e-15));
  const Trajectory fine =
      integrate_ode(p, make_state(0.3, 0.2, 0.3), 2.0, 1e-4);
  // Mid-step error is O(h^4): ~5.5e-9 at h = 0.01 on this field.
  CHECK(max_state_diff(tr.at(0.5037), fine.at(0.5037)) < 2e-8);
  const Trajectory half =
      integrate_ode(p, make_state(0.3, 0.2, 0.3), 2.0, 0.005);
  CHECK(max_state_diff(half.at(0.5037), fine.at(0.5037)) <
        max_state_diff(tr.at(0.5037), fine.at(0.5037)) / 8.0);
  CHECK_THROWS_AS(tr.at(2.5), domain_error);
}

TEST_CASE("trapping-box entry is flagged") {
  const Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9);
  const Trajectory tr = integrate_ode(p, make_state(0.5, 0.5, 0.5), 10.0, 0.01);
  REQUIRE(tr.flags.bounds_entry_time.has_value());
  CHECK(*tr.flags.bounds_entry_time > 0.0);
  CHECK(!tr.flags.nonneg_violation.has_value());
  CHECK(!tr.flags.blow_up_time.has_value());
  const auto box = invariant_box(p);
  for (size_t i = 0; i < tr.t.size(); ++i)
    if (tr.t[i] >= *tr.flags.bounds_entry_time)
      CHECK(box->contains(tr.y[i], 1e-9));
}

TEST_CASE("numeric blow-up is detected and the run truncated") {
  // A stiff clearance far beyond the step stability limit makes the scheme
  // itself diverge; the detector must catch the overflow and stop.
  const Params p = make_params(1, 0, 1e8, 1, 0.1, 1);
  const Trajectory tr = integrate_ode(p, make_state(1, 0.5, 1), 10.0, 0.1);
  REQUIRE(tr.flags.blow_up_time.has_value());
  CHECK(*tr.flags.blow_up_time < 10.0);
  CHECK(tr.t.back() < 10.0);
  for (const auto& y : tr.y) {
    CHECK(std::isfinite(y.a));
    CHECK(std::isfinite(y.r));
    CHECK(std::isfinite(y.o));
  }
}

TEST_CASE("no-clearance channel grows without finite-time blow-up") {
  // d(r - 1/r)/dt = 1 on this face: r - 1/r = t - 1.5.
  const Params p = make_params(1, 0, 1, 1, 0, 0);
  const Trajectory tr = integrate_ode(p, make_state(1, 0.5, 1), 4.0, 1e-3);
  CHECK(!tr.flags.blow_up_time.has_value());
  const State yT = tr.y.back();
  CHECK(near(yT.r, 2.850781, 1e-4));
  CHECK(near(yT.r - 1.0 / yT.r, 4.0 - 1.5, 1e-6));
}

TEST_CASE("delay solver reduces to the plain solver at zero delay") {
  const Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9, 0.0);
  const History h = History::constant(0.3, 0.2, 0.3);
  const Trajectory a = integrate_dde(p, h, 2.0, 100);
  const Trajectory b = integrate_ode(p, make_state(0.3, 0.2, 0.3), 2.0, 0.01);
  REQUIRE(a.t.size() == b.t.size());
  for (size_t i = 0; i < a.t.size(); ++i)
    CHECK(max_state_diff(a.y[i], b.y[i]) == 0.0);
}

TEST_CASE("delay solver holds an equilibrium history fixed") {
  Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9, 1.5);
  const Equilibrium eq = solve_equilibrium(p);
  const History h = History::constant(eq.a, eq.r, eq.o);
  const Trajectory tr = integrate_dde(p, h, 15.0, 200);
  CHECK(tr.flags.fitting_ok);
  for (const auto& y : tr.y) CHECK(max_state_diff(y, eq.state()) < 1e-12);
}

TEST_CASE("mismatched initial slope is reported, not rejected") {
  Params p = make_params(1.5, 1.8, 0.2, 5.0, 0.11, 0.9, 6.0);
  const History h = History::constant(3.2599863118626, 0.234078749105,
                                      3.19606501163);
  const Trajectory tr = integrate_dde(p, h, 12.0, 64);
  CHECK(!tr.flags.fitting_ok);
}

TEST_CASE("delay solver input guards") {
  Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9, 1.0);
  const History h = History::constant(0.3, 0.2, 0.3);
  CHECK_THROWS_AS(integrate_dde(p, h, 2.0, 8), invalid_argument_error);
  CHECK_THROWS_AS(integrate_dde(p, h, 0.0, 100), invalid_argument_error);
  const History bad = History::constant(0.3, 0.0, 0.3);
  CHECK_THROWS_AS(integrate_dde(p, bad, 2.0, 100), domain_error);
}

TEST_CASE("delay solver converges at fourth order") {
  Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9, 1.0);
  const History h = History::quadexp(0.124843945069, 0.1, 0.05, 0.15);
  const Trajectory ref = integrate_dde(p, h, 2.0, 1024);
  auto coarse_err = [&](int spd) {
    const Trajectory tr = integrate_dde(p, h, 2.0, spd);
    double err = 0.0;
    for (size_t i = 0; i < tr.t.size(); ++i)
      err = std::max(err, max_state_diff(tr.y[i], ref.at(tr.t[i])));
    return err;
  };
  const double e32 = coarse_err(32);
  const double e64 = coarse_err(64);
  const double e128 = coarse_err(128);
  CHECK(e32 / e64 > 12.0);
  CHECK(e32 / e64 < 22.0);
  CHECK(e64 / e128 > 12.0);
  CHECK(e64 / e128 < 22.0);
}

TEST_CASE("fixed-point oracle brackets and matches the marching solver") {
  Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9, 1.0);
  const History h = History::quadexp(0.124843945069, 0.1, 0.05, 0.15);
  const PicardResult pr = picard_oracle(p, h, 2);
  REQUIRE(pr.envelopes.size() == 2);
  for (const auto& env : pr.envelopes) {
    CHECK(env.bracket_ok);
    CHECK(env.sweeps <= 200);
    CHECK(env.a_lo <= env.a_hi);
  }
  const Trajectory dde = integrate_dde(p, h, 2.0, 200);
  double err = 0.0;
  for (size_t i = 0; i < pr.traj.t.size(); ++i)
    err = std::max(err, max_state_diff(pr.traj.y[i], dde.at(pr.traj.t[i])));
  CHECK(err < 1e-5);
  // Envelope windows really contain the marching solution.
  for (size_t i = 0; i < dde.t.size(); ++i) {
    const int w = std::min(1, static_cast<int>(dde.t[i] / p.tau));
    const auto& env = pr.envelopes[static_cast<size_t>(w)];
    CHECK(dde.y[i].a >= env.a_lo - 1e-9);
    CHECK(dde.y[i].a <= env.a_hi + 1e-9);
    CHECK(dde.y[i].r >= env.r_lo - 1e-9);
    CHECK(dde.y[i].r <= env.r_hi + 1e-9);
    CHECK(dde.y[i].o >= env.o_lo - 1e-9);
    CHECK(dde.y[i].o <= env.o_hi + 1e-9);
  }
}

TEST_CASE("fixed-point oracle guards") {
  Params p = make_params(1, 15, 7.2, 0.05, 0.11, 2.9, 0.0);
  const History h = History::quadexp(0.124843945069, 0.1, 0.05, 0.15);
  CHECK_THROWS_AS(picard_oracle(p, h, 2), invalid_argument_error);
  p.tau = 1.0;
  CHECK_THROWS_AS(picard_oracle(p, h, 0), invalid_argument_error);
}

TEST_CASE("fixed-point oracle flags a runaway iteration") {
  // L tau ~ 400: the warm-up excursion blows past the 1e6 x first-delta cap
  // long before the factorial can win in floating point.
  const Params p = make_params(1, 15, 200.0, 0.05, 0.11, 2.9, 2.0);
  const History h = History::constant(0.1, 0.05, 0.15);
  CHECK_THROWS_AS(picard_oracle(p, h, 1), no_convergence);
}
