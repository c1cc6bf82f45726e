#include "hpax/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hpax/error.hpp"

namespace hpax {

namespace {

constexpr double kBlowUpMag = 1e12;
constexpr double kNonnegTol = 1e-12;
constexpr double kBoxTol = 1e-9;

bool bad_state(const State& y) {
  return !std::isfinite(y.a) || !std::isfinite(y.r) || !std::isfinite(y.o) ||
         std::abs(y.a) > kBlowUpMag || std::abs(y.r) > kBlowUpMag ||
         std::abs(y.o) > kBlowUpMag;
}

void hermite_channel(double y0, double d0, double y1, double d1, double h,
                     double c[4]) {
  c[0] = y0;
  c[1] = d0;
  c[2] = (3.0 * (y1 - y0) / h - 2.0 * d0 - d1) / h;
  c[3] = (2.0 * (y0 - y1) / h + d0 + d1) / (h * h);
}

double eval_cubic(const double c[4], double w) {
  return c[0] + w * (c[1] + w * (c[2] + w * c[3]));
}

// int p(u) e^{u-c} du with p cubic in w = u - t0:
// antiderivative e^{u-c} (p - p' + p'' - p''').
double cubic_int_exp(const double c[4], double t0, double u0, double u1,
                     double shift) {
  auto anti = [&](double u) {
    const double w = u - t0;
    const double p = eval_cubic(c, w);
    const double p1 = c[1] + w * (2.0 * c[2] + w * 3.0 * c[3]);
    const double p2 = 2.0 * c[2] + 6.0 * c[3] * w;
    const double p3 = 6.0 * c[3];
    return std::exp(u - shift) * (p - p1 + p2 - p3);
  };
  return anti(u1) - anti(u0);
}

// Post-run flag scans shared by both integrators.
void scan_flags(const Params& p, Trajectory& tr) {
  for (size_t i = 0; i < tr.t.size(); ++i) {
    const State& y = tr.y[i];
    if (y.a < -kNonnegTol || y.r < -kNonnegTol || y.o < -kNonnegTol) {
      tr.flags.nonneg_violation = tr.t[i];
      break;
    }
  }
  if (tr.flags.blow_up_time) return; // truncated run: box entry is moot
  if (auto box = invariant_box(p)) {
    size_t last_outside = tr.t.size(); // sentinel: none
    for (size_t i = tr.t.size(); i-- > 0;) {
      if (!box->contains(tr.y[i], kBoxTol)) {
        last_outside = i;
        break;
      }
    }
    if (last_outside == tr.t.size())
      tr.flags.bounds_entry_time = tr.t.front();
    else if (last_outside + 1 < tr.t.size())
      tr.flags.bounds_entry_time = tr.t[last_outside + 1];
  }
}

} // namespace

State Trajectory::at(double tq) const {
  if (t.size() < 2) throw domain_error("trajectory too short for evaluation");
  const double lo = t.front(), hi = t.back();
  if (tq < lo - 1e-12 || tq > hi + 1e-12)
    throw domain_error("evaluation time outside trajectory span");
  tq = std::clamp(tq, lo, hi);
  const size_t i = std::min<size_t>(
      t.size() - 2,
      static_cast<size_t>(std::upper_bound(t.begin(), t.end(), tq) - t.begin()) -
          1);
  const double h = t[i + 1] - t[i];
  const double w = tq - t[i];
  double c[4];
  State out;
  hermite_channel(y[i].a, dy[i].a, y[i + 1].a, dy[i + 1].a, h, c);
  out.a = eval_cubic(c, w);
  hermite_channel(y[i].r, dy[i].r, y[i + 1].r, dy[i + 1].r, h, c);
  out.r = eval_cubic(c, w);
  hermite_channel(y[i].o, dy[i].o, y[i + 1].o, dy[i + 1].o, h, c);
  out.o = eval_cubic(c, w);
  return out;
}

Trajectory integrate_ode(const Params& p, const State& y0, double t_end,
                         double dt) {
  validate(p);
  validate(y0);
  if (!(t_end > 0) || !(dt > 0))
    throw invalid_argument_error("t_end and dt must be positive");
  // r = 0 is admitted: the vector field is defined there (0/0 := 0 rule) and
  // the flat-r orbit is exactly the closed-form solution for p5 = p6 = 0.
  if (y0.a < 0 || y0.r < 0 || !(y0.o > 0))
    throw domain_error("initial state must satisfy a >= 0, r >= 0, o > 0");

  const long n = std::max(1L, static_cast<long>(std::ceil(t_end / dt - 1e-12)));
  const double h = t_end / static_cast<double>(n);

  auto f = [&](const State& y) { return rhs(p, y, y.a); };
  auto step = [&](const State& y, double hs) {
    const State k1 = f(y);
    const State y2{y.a + 0.5 * hs * k1.a, y.r + 0.5 * hs * k1.r, y.o + 0.5 * hs * k1.o};
    const State k2 = f(y2);
    const State y3{y.a + 0.5 * hs * k2.a, y.r + 0.5 * hs * k2.r, y.o + 0.5 * hs * k2.o};
    const State k3 = f(y3);
    const State y4{y.a + hs * k3.a, y.r + hs * k3.r, y.o + hs * k3.o};
    const State k4 = f(y4);
    return State{y.a + hs / 6.0 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a),
                 y.r + hs / 6.0 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r),
                 y.o + hs / 6.0 * (k1.o + 2 * k2.o + 2 * k3.o + k4.o)};
  };

  Trajectory tr;
  tr.t.reserve(n + 1);
  tr.y.reserve(n + 1);
  tr.dy.reserve(n + 1);
  tr.t.push_back(0.0);
  tr.y.push_back(y0);
  tr.dy.push_back(f(y0));
  for (long i = 0; i < n; ++i) {
    const State next = step(tr.y.back(), h);
    if (bad_state(next)) {
      // Bisect the escape time within this step to 1e-6.
      double lo = 0.0, hi = h;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (bad_state(step(tr.y.back(), mid)) ? hi : lo) = mid;
      }
      tr.flags.blow_up_time = tr.t.back() + 0.5 * (lo + hi);
      break;
    }
    tr.t.push_back(tr.t.back() + h);
    tr.y.push_back(next);
    tr.dy.push_back(f(next));
  }
  scan_flags(p, tr);
  return tr;
}

namespace {

// Closed-form integral of the axis record against e^{u-shift} across the
// history piece (u <= 0) and completed step pieces.
struct AxisRecord {
  const History* hist;
  double h;
  std::vector<std::array<double, 4>> coefs; // per completed step

  double integral_exp(double u0, double u1, double shift) const {
    double total = 0.0;
    if (u0 < 0.0) {
      const double top = std::min(u1, 0.0);
      total += hist->integral_exp(u0, top, shift);
      u0 = top;
    }
    while (u0 < u1 - 1e-12 * h) {
      // Breakpoints land on exact grid multiples; snap near-integer indices
      // so accumulated rounding never misfloors the segment.
      const double q = u0 / h;
      const double rq = std::round(q);
      size_t j = std::abs(q - rq) < 1e-6 ? static_cast<size_t>(rq)
                                         : static_cast<size_t>(q);
      j = std::min(j, coefs.size() - 1);
      const double seg_end = std::min(u1, (static_cast<double>(j) + 1.0) * h);
      total += cubic_int_exp(coefs[j].data(), static_cast<double>(j) * h, u0,
                             seg_end, shift);
      u0 = seg_end;
    }
    return total;
  }

  double value(double u) const {
    if (u <= 0.0) return hist->value(u);
    const auto j =
        std::min(coefs.size() - 1, static_cast<size_t>(u / h + 1e-12));
    return eval_cubic(coefs[j].data(), u - static_cast<double>(j) * h);
  }
};

} // namespace

Trajectory integrate_dde(const Params& p, const History& hist, double t_end,
                         int steps_per_delay) {
  validate(p);
  if (steps_per_delay < 16)
    throw invalid_argument_error("steps_per_delay must be >= 16");
  if (!(t_end > 0)) throw invalid_argument_error("t_end must be positive");
  if (p.tau == 0.0) {
    State y0{hist.value(0.0), hist.r0(), hist.o0()};
    Trajectory tr = integrate_ode(p, y0, t_end, 1.0 / steps_per_delay);
    tr.flags.fitting_ok = check_fitting_condition(p, hist);
    return tr;
  }
  if (!(p.tau > 0)) throw invalid_argument_error("tau must be nonnegative");

  const double h = p.tau / steps_per_delay;
  const long n = std::max(1L, std::lround(t_end / h));

  AxisRecord rec{&hist, h, {}};
  rec.coefs.reserve(n);

  auto f_ar = [&](double a, double r, double o) {
    const double s = o * r;
    return std::pair<double, double>{p.A / (1.0 + p.p2 * s) - p.p3 * a,
                                     hill(p.p4, s) + p.p5 - p.p6 * r};
  };
  // Exact o(tq) from o(ti): e^{ti-tq} o_i plus the delayed-axis moment.
  auto o_at = [&](double tq, double ti, double oi) {
    if (tq == ti) return oi;
    return std::exp(ti - tq) * oi +
           rec.integral_exp(ti - p.tau, tq - p.tau, tq - p.tau);
  };

  Trajectory tr;
  tr.flags.fitting_ok = check_fitting_condition(p, hist);
  tr.t.reserve(n + 1);
  tr.y.reserve(n + 1);
  tr.dy.reserve(n + 1);

  State y{hist.value(0.0), hist.r0(), hist.o0()};
  validate(y);
  if (y.a < 0 || !(y.r > 0) || !(y.o > 0))
    throw domain_error("initial point must satisfy a >= 0, r > 0, o > 0");

  auto push_node = [&](double t, const State& s) {
    tr.t.push_back(t);
    tr.y.push_back(s);
    const auto [da, dr] = f_ar(s.a, s.r, s.o);
    tr.dy.push_back({da, dr, rec.value(t - p.tau) - s.o});
  };
  push_node(0.0, y);

  auto advance = [&](long i, double hs) {
    const double ti = tr.t[i];
    const State& cur = tr.y[i];
    const double om = o_at(ti + 0.5 * hs, ti, cur.o);
    const double oe = o_at(ti + hs, ti, cur.o);
    const auto k1 = f_ar(cur.a, cur.r, cur.o);
    const auto k2 = f_ar(cur.a + 0.5 * hs * k1.first, cur.r + 0.5 * hs * k1.second, om);
    const auto k3 = f_ar(cur.a + 0.5 * hs * k2.first, cur.r + 0.5 * hs * k2.second, om);
    const auto k4 = f_ar(cur.a + hs * k3.first, cur.r + hs * k3.second, oe);
    return State{
        cur.a + hs / 6.0 * (k1.first + 2 * k2.first + 2 * k3.first + k4.first),
        cur.r + hs / 6.0 * (k1.second + 2 * k2.second + 2 * k3.second + k4.second),
        oe};
  };

  for (long i = 0; i < n; ++i) {
    const State next = advance(i, h);
    if (bad_state(next)) {
      double lo = 0.0, hi = h;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (bad_state(advance(i, mid)) ? hi : lo) = mid;
      }
      tr.flags.blow_up_time = tr.t.back() + 0.5 * (lo + hi);
      break;
    }
    push_node(tr.t.back() + h, next);
    auto& c = rec.coefs.emplace_back();
    hermite_channel(tr.y[i].a, tr.dy[i].a, next.a, tr.dy[i + 1].a, h, c.data());
  }
  scan_flags(p, tr);
  return tr;
}

PicardResult picard_oracle(const Params& p, const History& hist, int windows,
                           int max_sweeps, int grid_per_window) {
  validate(p);
  if (!(p.tau > 0)) throw invalid_argument_error("picard oracle needs tau > 0");
  if (!(p.p3 > 0 && p.p6 > 0))
    throw domain_error("picard envelopes need p3 > 0 and p6 > 0");
  if (windows < 1 || grid_per_window < 2 || max_sweeps < 1)
    throw invalid_argument_error("bad picard oracle controls");

  const int n = grid_per_window + 1;
  const double h = p.tau / grid_per_window;

  PicardResult res;
  res.traj.flags.fitting_ok = check_fitting_condition(p, hist);

  std::vector<double> a_prev(n);
  for (int k = 0; k < n; ++k) a_prev[k] = hist.value(-p.tau + k * h);
  double a0c = hist.value(0.0), r0c = hist.r0(), o0c = hist.o0();

  auto push = [&](double t, double a, double r, double o, double ad) {
    res.traj.t.push_back(t);
    res.traj.y.push_back({a, r, o});
    const double s = o * r;
    res.traj.dy.push_back({p.A / (1.0 + p.p2 * s) - p.p3 * a,
                           hill(p.p4, s) + p.p5 - p.p6 * r, ad - o});
  };
  push(0.0, a0c, r0c, o0c, a_prev[n - 1 - grid_per_window]);

  for (int w = 0; w < windows; ++w) {
    const double t0 = w * p.tau;
    // o explicit from the previous window's axis record (trapezoid moments).
    std::vector<double> o(n), a(n, a0c), r(n, r0c);
    o[0] = o0c;
    for (int k = 1; k < n; ++k) {
      double integ = 0.0;
      for (int j = 0; j < k; ++j) {
        const double w0 = a_prev[j] * std::exp((j - k) * h);
        const double w1 = a_prev[j + 1] * std::exp((j + 1 - k) * h);
        integ += 0.5 * h * (w0 + w1);
      }
      o[k] = std::exp(-k * h) * o0c + integ;
    }

    double last_delta = std::numeric_limits<double>::infinity();
    double first_delta = 0.0;
    bool contracted_once = false;
    int growth_run = 0;
    int sweeps = 0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      sweeps = sweep + 1;
      std::vector<double> fa(n), fr(n);
      for (int k = 0; k < n; ++k) {
        const double s = o[k] * r[k];
        fa[k] = p.A / (1.0 + p.p2 * s) - p.p3 * a[k];
        fr[k] = hill(p.p4, s) + p.p5 - p.p6 * r[k];
      }
      double delta = 0.0;
      double acc_a = 0.0, acc_r = 0.0;
      std::vector<double> a_new(n), r_new(n);
      a_new[0] = a0c;
      r_new[0] = r0c;
      for (int k = 1; k < n; ++k) {
        acc_a += 0.5 * h * (fa[k] + fa[k - 1]);
        acc_r += 0.5 * h * (fr[k] + fr[k - 1]);
        a_new[k] = a0c + acc_a;
        r_new[k] = r0c + acc_r;
        delta = std::max(delta, std::abs(a_new[k] - a[k]));
        delta = std::max(delta, std::abs(r_new[k] - r[k]));
      }
      a.swap(a_new);
      r.swap(r_new);
      if (delta < 1e-13) break;
      if (!std::isfinite(delta)) throw no_convergence("picard sweeps diverging");
      // The first sweeps may legitimately grow like (L tau)^n / n! before the
      // factorial wins; arm the growth-run counter only once a contraction has
      // been observed, and cap the warm-up excursion at 1e6 x the first delta.
      if (sweep == 0) {
        first_delta = delta;
      } else if (delta > last_delta) {
        ++growth_run;
        if ((contracted_once && growth_run >= 5) || delta > 1e6 * first_delta)
          throw no_convergence("picard sweeps diverging");
      } else {
        contracted_once = true;
        growth_run = 0;
      }
      last_delta = delta;
    }

    WindowEnvelope env;
    env.sweeps = sweeps;
    const auto [ma_it, Ma_it] = std::minmax_element(a_prev.begin(), a_prev.end());
    env.o_lo = std::min(o0c, *ma_it);
    env.o_hi = std::max(o0c, *Ma_it);
    env.r_lo = std::min(r0c, p.p5 / p.p6);
    env.r_hi = std::max(r0c, (p.p5 + 1.0) / p.p6);
    const double s_hi = env.o_hi * env.r_hi;
    env.a_lo = std::min(a0c, p.A / (p.p3 * (1.0 + p.p2 * s_hi)));
    env.a_hi = std::max(a0c, p.A / p.p3);
    env.bracket_ok = true;
    for (int k = 0; k < n; ++k) {
      if (a[k] < env.a_lo - 1e-9 || a[k] > env.a_hi + 1e-9 ||
          r[k] < env.r_lo - 1e-9 || r[k] > env.r_hi + 1e-9 ||
          o[k] < env.o_lo - 1e-9 || o[k] > env.o_hi + 1e-9)
        env.bracket_ok = false;
    }
    res.envelopes.push_back(env);

    for (int k = 1; k < n; ++k) push(t0 + k * h, a[k], r[k], o[k], a_prev[k]);
    a_prev.assign(a.begin(), a.end());
    a0c = a[n - 1];
    r0c = r[n - 1];
    o0c = o[n - 1];
  }
  return res;
}

State explicit_case_solution(const Params& p, const State& y0, double t) {
  validate(p);
  validate(y0);
  const bool case_linear = (p.p2 == 0.0 && p.p4 == 0.0);
  const bool case_flat_r = (p.p5 == 0.0 && p.p6 == 0.0 && y0.r == 0.0);
  if (!case_linear && !case_flat_r)
    throw unsupported_case("no closed-form solution for these parameters");
  if (!(p.p3 > 0))
    throw unsupported_case("closed form needs p3 > 0");

  const double abar = p.A / p.p3;
  State out;
  out.a = (y0.a - abar) * std::exp(-p.p3 * t) + abar;
  if (case_linear) {
    if (!(p.p6 > 0)) throw unsupported_case("closed form needs p6 > 0");
    const double rbar = (1.0 + p.p5) / p.p6;
    out.r = (y0.r - rbar) * std::exp(-p.p6 * t) + rbar;
  } else {
    out.r = 0.0;
  }
  const double q = 1.0 - p.p3;
  const double I = q == 0.0 ? t : std::expm1(q * t) / q;
  out.o = abar + (y0.o - abar) * std::exp(-t) + (y0.a - abar) * std::exp(-t) * I;
  return out;
}

}  // namespace hpax
