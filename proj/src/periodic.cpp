#include "hpax/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hpax/error.hpp"

namespace hpax {

PeriodicSetup build_periodic_setup(const Params& p, std::optional<double> r0_opt,
                                   std::optional<History::Kind> kind) {
  validate(p);
  if (!(p.tau > 0)) throw domain_error("periodic setup needs tau > 0");
  if (!(p.p3 > 0 && p.p6 > 0))
    throw domain_error("periodic setup needs p3 > 0 and p6 > 0");

  const double lo = p.p5 / p.p6;
  const double hi = (p.p5 + 1.0) / p.p6;
  const double r0 = r0_opt.value_or(0.5 * (lo + hi));
  if (!(r0 > lo && r0 < hi))
    throw domain_error("r0 must lie strictly inside the uptake band");

  PeriodicSetup s;
  s.r0 = r0;
  const double e1 = p.p6 * r0 - p.p5;
  const double e2 = p.p5 + 1.0 - p.p6 * r0;
  s.a_tau_0 = (p.A / p.p3) / (1.0 + p.p2 * std::sqrt(p.p4 * e1 / e2));
  s.o0 = s.a_tau_0;

  auto finish = [&](History h) {
    s.fitting_residual = fitting_residual(p, h);
    s.history = std::move(h);
    return s;
  };

  const History::Kind want = kind.value_or(History::Kind::quadexp);
  if (want == History::Kind::constant || want == History::Kind::quadexp) {
    History h = want == History::Kind::constant
                    ? History::constant(s.a_tau_0, r0, s.o0)
                    : History::quadexp(s.a_tau_0,
                                       (s.o0 - s.a_tau_0) *
                                           std::exp(p.tau) / (p.tau * p.tau),
                                       r0, s.o0);
    if (check_fitting_condition(p, h)) return finish(std::move(h));
    if (kind.has_value())
      throw infeasible_history("requested history kind cannot satisfy the "
                               "fitting condition at this r0");
    s.fallback_used = true;
  }

  // Hermite bridge: flat at -tau (value o0), slope-matched at 0.
  const double d0 = p.A / (1.0 + p.p2 * s.o0 * r0) - p.p3 * s.a_tau_0;
  History h = History::hermite({-p.tau, 0.0}, {s.o0, s.a_tau_0}, {0.0, d0},
                               r0, s.o0);
  if (!check_fitting_condition(p, h))
    throw infeasible_history("no history profile fits this setup");
  return finish(std::move(h));
}

PeriodicityReport verify_periodicity(const Trajectory& tr, double period,
                                     double t_start, int samples) {
  if (!(period > 0) || samples < 2)
    throw invalid_argument_error("bad period or sample count");
  if (t_start < tr.t_begin() - 1e-9 ||
      tr.t_end() < t_start + 2.0 * period - 1e-9)
    throw domain_error("trajectory must cover [t_start, t_start + 2 period]");

  PeriodicityReport rep;
  for (int k = 0; k < samples; ++k) {
    const double tq =
        t_start + period * static_cast<double>(k) / (samples - 1);
    const State s0 = tr.at(tq);
    const State s1 = tr.at(tq + period);
    const double d = std::max({std::abs(s1.a - s0.a), std::abs(s1.r - s0.r),
                               std::abs(s1.o - s0.o)});
    const double dprod = std::abs(s1.o * s1.r - s0.o * s0.r);
    rep.residual = std::max(rep.residual, d + dprod);
  }

  double mins[4], maxs[4];
  std::fill_n(mins, 4, 1e300);
  std::fill_n(maxs, 4, -1e300);
  for (size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t_start - 1e-12 || tr.t[i] > t_start + 2.0 * period + 1e-12)
      continue;
    const double vals[4] = {tr.y[i].a, tr.y[i].r, tr.y[i].o,
                            tr.y[i].o * tr.y[i].r};
    for (int c = 0; c < 4; ++c) {
      mins[c] = std::min(mins[c], vals[c]);
      maxs[c] = std::max(maxs[c], vals[c]);
    }
  }
  for (int c = 0; c < 4; ++c)
    rep.amplitude = std::max(rep.amplitude, maxs[c] - mins[c]);

  rep.periodic = rep.residual <= 1e-3 * rep.amplitude + 1e-12;
  return rep;
}

PeriodEstimate estimate_period(const Trajectory& tr, double t_start) {
  PeriodEstimate est;
  std::vector<double> x;
  double h = 0;
  double prev_t = 0;
  double max_abs = 0;
  for (size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < t_start) continue;
    if (!x.empty()) h = tr.t[i] - prev_t;
    prev_t = tr.t[i];
    x.push_back(tr.y[i].a);
    max_abs = std::max(max_abs, std::abs(tr.y[i].a));
  }
  const size_t n = x.size();
  if (n < 8 || !(h > 0)) return est;

  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double rms = 0;
  for (double& v : x) {
    v -= mean;
    rms += v * v;
  }
  rms = std::sqrt(rms / static_cast<double>(n));
  if (rms < 1e-9 * (1.0 + max_abs)) return est;

  std::vector<double> ac(n, 0.0);
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i + k < n; ++i) ac[k] += x[i] * x[i + k];
  for (size_t k = n; k-- > 0;) ac[k] /= ac[0];

  // Skip the central lobe, then take the first local maximum.
  size_t i = 1;
  while (i < n - 1 && !(ac[i] < 0 || ac[i] < ac[i + 1])) ++i;
  size_t best_i = 0;
  for (size_t j = std::max<size_t>(i, 1); j < n - 1; ++j) {
    if (ac[j] >= ac[j - 1] && ac[j] > ac[j + 1]) {
      best_i = j;
      est.peak = ac[j];
      break;
    }
  }
  if (best_i == 0 || est.peak < 0.2) return est;

  const double y0 = ac[best_i - 1], y1 = ac[best_i], y2 = ac[best_i + 1];
  const double d = 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2);
  est.period = (static_cast<double>(best_i) + d) * h;
  return est;
}

}  // namespace hpax
