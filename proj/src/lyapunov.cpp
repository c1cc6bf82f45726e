#include "hpax/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hpax/error.hpp"
#include "hpax/integrate.hpp"

namespace hpax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 2 p2 / (sqrt(1 + 4 p2 p5 A / den) - 1) rewritten cancellation-free as
// den (sqrt(1 + rad) + 1) / (2 p5 A); finite limit at p2 = 0, vacuous
// (+inf) when p5 A = 0 or den <= 0.
double product_bound_term(const Params& p, double den) {
  if (!(den > 0.0) || !(p.p5 > 0.0) || !(p.A > 0.0)) return kInf;
  const double rad = 4.0 * p.p2 * p.p5 * p.A / den;
  return den * (std::sqrt(1.0 + rad) + 1.0) / (2.0 * p.p5 * p.A);
}

struct GoldenResult {
  double x = 0, f = 0;
};

// Golden-section minimum of a unimodal f on [lo, hi], interval tolerance
// 1e-10 * (1 + hi).
template <typename Fn>
GoldenResult golden_min(Fn&& f, double lo, double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-10 * (1.0 + hi)) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(d);
    }
  }
  GoldenResult out;
  out.x = 0.5 * (lo + hi);
  out.f = f(out.x);
  return out;
}

} // namespace

double lyapunov_value(const Equilibrium& eq, const State& y) {
  const double da = y.a - eq.a;
  const double dr = y.r - eq.r;
  const double dooo = y.o - eq.o;
  const double ds = y.o * y.r - eq.o * eq.r;
  return 0.5 * (da * da + dr * dr + dooo * dooo + ds * ds);
}

double lyapunov_F(const Params& p, double A) {
  if (!(p.p3 > 0.0) || !(p.p5 > 0.0) || !(p.p6 > 0.0) || !(A > 0.0))
    throw domain_error("amplitude map needs p3, p5, p6 and A positive");
  const double x = 4.0 * p.p2 * p.p5 * A / p.p6;
  // tail 8 p2 / (sqrt(1+x) - 1) = 2 p6 (sqrt(1+x) + 1) / (p5 A), stable at p2=0
  return (p.p6 + 1.0 + p.p2 * p.p3) / p.p3 * A +
         2.0 * p.p6 * (std::sqrt(1.0 + x) + 1.0) / (p.p5 * A);
}

LyapunovReport lyapunov_constants(const Params& p, const Equilibrium& eq) {
  LyapunovReport rep;
  rep.minv = std::min({p.p3 - 0.5, p.p6, 1.0});
  rep.min_at_p6 = p.p6 <= p.p3 - 0.5 && p.p6 <= 1.0;
  rep.hypotheses_ok = p.A >= 0.0 && p.p2 >= 0.0 && p.p4 >= 0.0 &&
                      p.p3 > 0.5 && p.p6 > 1.0 / rep.minv && p.p5 >= 0.0 &&
                      p.p5 < p.p6 * rep.minv - 1.0;

  const double s = eq.o * eq.r;
  const double g4 = p.p4 + s * s > 0.0 ? 4.0 * s / (p.p4 + s * s) : 0.0;
  const double mid = eq.r + (p.p6 + 1.0) * eq.a + g4;
  rep.condition_ok = 0.0 < mid && mid < rep.minv - p.A * p.p2;
  rep.applicable = rep.hypotheses_ok && rep.condition_ok;

  rep.alpha = 2.0 * (rep.minv - p.A * p.p2 - mid);
  rep.beta = std::pow(2.0, 1.5) * (p.p6 + 1.0 + 0.75 * g4);
  rep.gamma = g4;
  if (rep.gamma > 0.0) {
    const double root = std::sqrt(rep.beta * rep.beta + 4.0 * rep.alpha * rep.gamma);
    const double radius = (root - rep.beta) / (2.0 * rep.gamma);
    rep.basin = radius * radius;
  } else {
    rep.basin = (rep.alpha / rep.beta) * (rep.alpha / rep.beta);
  }

  const double p4_term = p.p4 > 0.0 ? 1.0 / (2.0 * std::sqrt(p.p4)) : kInf;
  rep.gamma_cap_corrected = 4.0 * std::min(p4_term, product_bound_term(p, p.p3 * p.p6));
  rep.gamma_cap_printed = 4.0 * std::min(p4_term, product_bound_term(p, p.p6));

  // admissible-amplitude window in parameter space
  rep.B = p.p6 > 0.0 ? rep.minv - (p.p5 + 1.0) / p.p6 : -kInf;
  rep.large_p4_branch = p.p4 > 0.0 && 2.0 / std::sqrt(p.p4) < rep.B;
  if (rep.large_p4_branch) {
    const double sq = std::sqrt(p.p4);
    const double t1 = p.p5 > 0.0
                          ? (2.0 * p.p6 * sq / p.p5) * (1.0 + 2.0 * p.p2 * sq)
                          : kInf;
    const double t2 = (p.p3 / (p.p6 + 1.0 + p.p2 * p.p3)) * (rep.B - 2.0 / sq);
    rep.A0 = std::min(t1, t2);
  } else if (p.p3 > 0.0 && p.p5 > 0.0 && p.p6 > 0.0) {
    auto F = [&](double x) { return lyapunov_F(p, x); };
    double hi = 1.0;
    while (hi < 1e12 && F(2.0 * hi) < F(hi)) hi *= 2.0;
    const auto m = golden_min(F, 1e-12, 2.0 * hi);
    rep.A_min = m.x;
    rep.F_min = m.f;
    if (m.f < rep.B) {
      auto bisect = [&](double lo, double hi2) {
        // F - B changes sign between lo (positive) and hi2 (negative) or
        // vice versa; returns the crossing
        double flo = F(lo) - rep.B;
        while (hi2 - lo > 1e-12 * (1.0 + hi2)) {
          const double midx = 0.5 * (lo + hi2);
          const double fm = F(midx) - rep.B;
          if ((fm > 0.0) == (flo > 0.0)) {
            lo = midx;
            flo = fm;
          } else {
            hi2 = midx;
          }
        }
        return 0.5 * (lo + hi2);
      };
      double left = m.x;
      while (left > 1e-300 && F(left) < rep.B) left *= 0.5;
      double right = m.x;
      while (right < 1e300 && F(right) < rep.B) right *= 2.0;
      rep.A1 = bisect(left, m.x);
      rep.A2 = bisect(right, m.x);
    }
  }
  return rep;
}

DecayReport verify_decay(const Params& p, const Equilibrium& eq,
                         const State& initial, double t_end, double dt) {
  const auto rep = lyapunov_constants(p, eq);
  if (!rep.applicable)
    throw domain_error("decay certificate requires an applicable report");
  const double w0 = lyapunov_value(eq, initial);
  if (!(w0 < rep.basin))
    throw domain_error("initial energy not inside the certified basin");

  const auto tr = integrate_ode(p, initial, t_end, dt);
  DecayReport out;
  out.w0 = w0;
  out.monotone = true;
  out.max_inequality_gap = -kInf;
  const double sstar = eq.o * eq.r;
  double prev = w0;
  for (size_t i = 0; i < tr.t.size(); ++i) {
    const State& y = tr.y[i];
    const State& d = tr.dy[i];
    const double w = lyapunov_value(eq, y);
    if (i > 0 && w - prev > 1e-12) out.monotone = false;
    prev = w;
    // analytic dW/dt along the flow, using the stored nodal derivatives
    const double dwdt = (y.a - eq.a) * d.a + (y.r - eq.r) * d.r +
                        (y.o - eq.o) * d.o +
                        (y.o * y.r - sstar) * (d.o * y.r + y.o * d.r);
    const double bound =
        -rep.alpha * w + rep.beta * std::pow(w, 1.5) + rep.gamma * w * w;
    out.max_inequality_gap = std::max(out.max_inequality_gap, dwdt - bound);
  }
  out.w_final = prev;
  out.converged = w0 == 0.0 ? true : out.w_final < 1e-6 * w0;
  out.inequality_ok = out.max_inequality_gap <= 1e-6;
  return out;
}

} // namespace hpax
