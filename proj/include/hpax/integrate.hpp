#pragma once
#include <optional>
#include <vector>

#include "hpax/model.hpp"

namespace hpax {

struct TrajectoryFlags {
  std::optional<double> nonneg_violation;  // first node with a component < -1e-12
  std::optional<double> bounds_entry_time; // entry into the invariant box (tol 1e-9)
  std::optional<double> blow_up_time;      // bisected to 1e-6 when the run truncates
  bool fitting_ok = true;                  // history terminal-slope condition
};

// Uniform-grid trajectory with nodal derivatives; dense evaluation is the
// piecewise cubic Hermite interpolant (4th-order accurate between nodes).
struct Trajectory {
  std::vector<double> t;
  std::vector<State> y;
  std::vector<State> dy;
  TrajectoryFlags flags;

  double t_begin() const { return t.front(); }
  double t_end() const { return t.back(); }
  State at(double tq) const;
};

// Classical RK4 with a uniform step h = t_end / ceil(t_end / dt) <= dt on the
// tau = 0 field. Initial state must satisfy a >= 0, r >= 0, o > 0.
Trajectory integrate_ode(const Params& p, const State& y0, double t_end, double dt);

// Method of steps on [0, t_end] with h = tau / steps_per_delay: (a, r) by RK4
// with the o channel advanced exactly by variation of constants against the
// piecewise-cubic axis record (closed-form exponential moments, so delayed
// reads never extrapolate). t_end is rounded to a whole number of steps.
// steps_per_delay >= 16. tau = 0 redirects to integrate_ode with dt =
// 1 / steps_per_delay.
Trajectory integrate_dde(const Params& p, const History& h, double t_end,
                         int steps_per_delay = 200);

// Per-window a-priori bounds used by the fixed-point oracle (restart form).
struct WindowEnvelope {
  double a_lo = 0, a_hi = 0;
  double r_lo = 0, r_hi = 0;
  double o_lo = 0, o_hi = 0;
  int sweeps = 0;
  bool bracket_ok = false; // iterate stayed inside the envelope
};

struct PicardResult {
  Trajectory traj;
  std::vector<WindowEnvelope> envelopes;
};

// Independent cross-check: per-window trapezoid fixed-point iteration on the
// integral form of (a, r) with o eliminated explicitly. Sweeps stop at a
// 1e-13 sup-norm delta or `max_sweeps`. Five consecutive growing deltas after
// the first observed contraction throw no_convergence (the leading sweeps may
// grow like (L tau)^n / n!); a warm-up excursion past 1e6 x the first delta
// throws immediately. Grid is `grid_per_window` intervals per window.
PicardResult picard_oracle(const Params& p, const History& h, int windows,
                           int max_sweeps = 200, int grid_per_window = 200);

// Closed-form tau = 0 solution for the two solvable parameter cases
// (p2 = p4 = 0, or p5 = p6 = 0 with r0 = 0); unsupported_case otherwise.
State explicit_case_solution(const Params& p, const State& y0, double t);

}  // namespace hpax
