#pragma once
#include <optional>

#include "hpax/equilibria.hpp"
#include "hpax/model.hpp"

namespace hpax {

// Quadratic energy W = 1/2 [(a-a*)^2 + (r-r*)^2 + (o-o*)^2 + (or - o*r*)^2].
double lyapunov_value(const Equilibrium& eq, const State& y);

struct LyapunovReport {
  // Hypotheses: A >= 0, p2 >= 0, p3 > 1/2, p4 >= 0, p6 > 1/minv,
  // 0 <= p5 < p6 * minv - 1, with minv = min{p3 - 1/2, p6, 1} evaluated
  // literally (self-referential when the min lands on p6 — flagged).
  bool hypotheses_ok = false;
  bool min_at_p6 = false;
  // Strict sandwich 0 < r* + (p6+1) a* + 4s/(p4+s^2) < minv - A p2.
  bool condition_ok = false;
  bool applicable = false; // hypotheses_ok && condition_ok

  double minv = 0;
  double alpha = 0, beta = 0, gamma = 0;
  double basin = 0; // W-threshold: decay certified for W(0) < basin

  // Parameter-domain analysis of the admissible-amplitude window.
  double B = 0;                      // minv - (p5+1)/p6
  bool large_p4_branch = false;      // 2/sqrt(p4) < B
  std::optional<double> A0;          // amplitude cap on the large-p4 branch
  std::optional<double> A_min, F_min; // interior minimum of F on the other branch
  std::optional<double> A1, A2;      // window ends where F = B (when F_min < B)

  // gamma-dominance cap 4 min{1/(2 sqrt(p4)), 2 p2/(sqrt(1 + rad) - 1)} with
  // the radicand in its corrected form (extra p3 in the denominator) and in
  // the uncorrected variant; the corrected one dominates gamma.
  double gamma_cap_corrected = 0;
  double gamma_cap_printed = 0;
};

LyapunovReport lyapunov_constants(const Params& p, const Equilibrium& eq);

// Amplitude map F(A) = ((p6+1+p2 p3)/p3) A + 8 p2 / (sqrt(1 + 4 p2 p5 A / p6) - 1),
// written in a cancellation-free form (finite limit as p2 -> 0).
double lyapunov_F(const Params& p, double A);

struct DecayReport {
  double w0 = 0, w_final = 0;
  bool converged = false;     // w_final < 1e-6 * w0
  bool monotone = false;      // W nonincreasing along the trajectory
  bool inequality_ok = false; // dW/dt <= -alpha W + beta W^1.5 + gamma W^2 + 1e-6
  double max_inequality_gap = 0;
};

// Integrates the tau = 0 flow from `initial` and audits the energy decay.
// Requires an applicable report and W(initial) < basin.
DecayReport verify_decay(const Params& p, const Equilibrium& eq,
                         const State& initial, double t_end = 30.0,
                         double dt = 0.01);

}  // namespace hpax
