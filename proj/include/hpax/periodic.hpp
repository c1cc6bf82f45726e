#pragma once
#include <optional>

#include "hpax/integrate.hpp"
#include "hpax/model.hpp"

namespace hpax {

struct PeriodicSetup {
  double r0 = 0;
  double o0 = 0;
  double a_tau_0 = 0; // axis value at t = 0 consistent with nullcline 2 at r0
  History history;
  bool fallback_used = false;   // requested/default profile could not fit
  double fitting_residual = 0;  // of the history actually returned
};

// Builds the oscillation probe: r0 defaults to the band midpoint (must lie
// strictly inside (p5/p6, (p5+1)/p6)), o0 = a_tau_0, and a history with
// a(-tau) = o0 and a(0) = a_tau_0. The default profile is the quadratic-
// exponential bump; when its terminal slope cannot satisfy the fitting
// condition the two-knot cubic Hermite bridge (slope-matched at 0, flat at
// -tau) is substituted. An explicitly requested kind that cannot fit throws
// infeasible_history.
PeriodicSetup build_periodic_setup(const Params& p,
                                   std::optional<double> r0 = std::nullopt,
                                   std::optional<History::Kind> kind = std::nullopt);

struct PeriodicityReport {
  double residual = 0;  // worst state gap + product-channel gap over one period
  double amplitude = 0; // largest channel range over two periods
  bool periodic = false; // residual <= 1e-3 * amplitude + 1e-12
};

// Compares the trajectory against its own period-shift on
// [t_start, t_start + period]; requires coverage through t_start + 2 period.
PeriodicityReport verify_periodicity(const Trajectory& tr, double period,
                                     double t_start, int samples = 400);

struct PeriodEstimate {
  std::optional<double> period;
  double peak = 0; // normalized autocorrelation height backing the estimate
};

// Autocorrelation of the demeaned axis channel after t_start: first
// significant peak (height >= 0.2) with parabolic refinement. Returns no
// period for flat signals or peaks under the floor.
PeriodEstimate estimate_period(const Trajectory& tr, double t_start);

}  // namespace hpax
