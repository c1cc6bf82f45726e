#include "hpax/delay.hpp"

#include <algorithm>
#include <cmath>

#include "hpax/error.hpp"
#include "hpax/poly.hpp"

namespace hpax {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

QuasiChar build(double p3, double p6, double K2, double K3, QcVariant variant) {
  QuasiChar qc;
  qc.p3 = p3;
  qc.p6 = p6;
  qc.K2 = K2;
  qc.K3 = K3;
  qc.variant = variant;
  const double m = p6 - K2;
  const double extra = variant == QcVariant::k3_in_both ? K3 : 0.0;
  qc.P = {m * p3 + extra * p6, p3 + m + m * p3 + extra, 1.0 + p3 + m, 1.0};
  qc.Q = {K3 * p6, K3};
  // F coefficients from |P(iy)|^2 - |Q(iy)|^2 with x = y^2.
  const double c0 = qc.P[0], cl = qc.P[1], cq = qc.P[2];
  qc.b = {cq * cq - 2.0 * cl, cl * cl - 2.0 * c0 * cq - K3 * K3,
          c0 * c0 - K3 * K3 * p6 * p6};
  qc.delta0 = qc.b[0] * qc.b[0] - 3.0 * qc.b[1];
  if (std::abs(qc.P[0] + qc.Q[0]) <= 1e-12)
    throw guard_violation("characteristic function vanishes at the origin");
  return qc;
}

} // namespace

std::complex<double> QuasiChar::eval(std::complex<double> lam, double tau) const {
  const std::complex<double> pv =
      ((lam + P[2]) * lam + P[1]) * lam + P[0];
  const std::complex<double> qv = Q[1] * lam + Q[0];
  return pv + qv * std::exp(-lam * tau);
}

std::complex<double> QuasiChar::eval_deriv(std::complex<double> lam,
                                           double tau) const {
  const std::complex<double> dp = (3.0 * lam + 2.0 * P[2]) * lam + P[1];
  const std::complex<double> qv = Q[1] * lam + Q[0];
  return dp + (Q[1] - tau * qv) * std::exp(-lam * tau);
}

QuasiChar make_quasi_char(const Params& p, const Equilibrium& eq,
                          QcVariant variant) {
  return build(p.p3, p.p6, eq.K2, eq.K3, variant);
}

QuasiChar make_quasi_char_injected(double p3, double p6, double K2, double K3,
                                   QcVariant variant) {
  return build(p3, p6, K2, K3, variant);
}

double f_function(const QuasiChar& qc, double y) {
  const std::complex<double> iy(0.0, y);
  const std::complex<double> pv = ((iy + qc.P[2]) * iy + qc.P[1]) * iy + qc.P[0];
  const std::complex<double> qv = qc.Q[1] * iy + qc.Q[0];
  return std::norm(pv) - std::norm(qv);
}

TheoremChecks theorem_checks(const QuasiChar& qc) {
  TheoremChecks t;
  t.real_symmetry = true;   // coefficients are real by construction
  t.finite_rhp_roots = true; // polynomial part dominates: finitely many
  t.finitely_many_crossings = true; // F is a monic cubic
  t.nonzero_at_origin = std::abs(qc.P[0] + qc.Q[0]) > 1e-12;
  if (qc.K3 == 0.0) {
    // Q vanishes identically: need P free of imaginary-axis zeros.
    t.no_common_imag_zero = true;
    for (const auto& z : poly_roots({qc.P[0], qc.P[1], qc.P[2], 1.0}))
      if (std::abs(z.real()) < 1e-9) t.no_common_imag_zero = false;
  } else if (qc.p6 == 0.0) {
    // Q's only zero sits at the origin.
    t.no_common_imag_zero = std::abs(qc.P[0]) > 1e-12;
  } else {
    t.no_common_imag_zero = true; // Q's zero is real and nonzero
  }
  t.all_ok = t.no_common_imag_zero && t.real_symmetry && t.nonzero_at_origin &&
             t.finite_rhp_roots && t.finitely_many_crossings;
  return t;
}

SwitchSchedule switch_schedule(const QuasiChar& qc, int n_max) {
  if (n_max < 1) throw invalid_argument_error("n_max must be >= 1");
  SwitchSchedule sch;
  sch.b = qc.b;
  sch.delta0 = qc.delta0;

  const auto t0roots =
      poly_roots({qc.P[0] + qc.Q[0], qc.P[1] + qc.Q[1], qc.P[2], 1.0});
  for (size_t i = 0; i < 3 && i < t0roots.size(); ++i)
    sch.tau0_roots[i] = t0roots[i];

  // Positive real roots of F with multiplicity screening.
  std::vector<double> xs;
  for (double x : real_roots({qc.b[2], qc.b[1], qc.b[0], 1.0}))
    if (x > 0.0) xs.push_back(x);
  std::vector<bool> multiple(xs.size(), false);
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    if (std::abs(xs[i + 1] - xs[i]) <= 1e-8 * (1.0 + std::abs(xs[i])))
      multiple[i] = multiple[i + 1] = true;
  if (std::find(multiple.begin(), multiple.end(), true) != multiple.end())
    sch.has_multiple_root = true;

  for (size_t i = 0; i < xs.size(); ++i) {
    if (multiple[i]) continue;
    const double x = xs[i];
    CrossingRoot rt;
    rt.x = x;
    rt.v = std::sqrt(x);
    const double A1 = qc.P[0] - qc.P[2] * x;       // Re P(iv)
    const double A4 = rt.v * (qc.P[1] - x);        // Im P(iv)
    const double A2 = -qc.Q[0];                    // -Re Q(iv)
    const double A3 = -qc.Q[1] * rt.v;             // -Im Q(iv)
    const double den = A2 * A2 + A3 * A3;
    rt.sin_vtau = (A1 * A3 - A2 * A4) / den;
    rt.cos_vtau = (A1 * A2 + A3 * A4) / den;
    rt.proviso_ok = std::max(std::abs(A1 * A3 - A2 * A4),
                             std::abs(A1 * A2 - A3 * A4)) <= den;
    rt.theta = std::atan2(rt.sin_vtau, rt.cos_vtau);
    if (rt.theta < 0) rt.theta += 2.0 * kPi;
    rt.fprime = (3.0 * x + 2.0 * qc.b[0]) * x + qc.b[1];
    rt.direction = rt.fprime > 0 ? CrossDir::left_to_right
                                 : CrossDir::right_to_left;
    if (rt.proviso_ok) {
      for (int n = 0; n < n_max; ++n) {
        const double tau = (rt.theta + 2.0 * kPi * n) / rt.v;
        rt.taus.push_back(tau);
        rt.max_residual = std::max(
            rt.max_residual, std::abs(qc.eval({0.0, rt.v}, tau)));
      }
    } else {
      sch.proviso_violation = true;
    }
    sch.roots.push_back(std::move(rt));
  }

  // Verdict and the critical delay from the crossing walk.
  double max_re0 = -1e300;
  for (const auto& z : sch.tau0_roots) max_re0 = std::max(max_re0, z.real());
  int count = 0;
  for (const auto& z : sch.tau0_roots)
    if (z.real() > 1e-9) ++count;

  std::vector<std::pair<double, int>> events; // (tau, +2 / -2)
  double horizon = 1e300;
  bool any_usable = false;
  for (const auto& rt : sch.roots) {
    if (!rt.proviso_ok || rt.taus.empty()) continue;
    any_usable = true;
    horizon = std::min(horizon, rt.taus.back());
  }
  for (const auto& rt : sch.roots) {
    if (!rt.proviso_ok) continue;
    for (double tau : rt.taus)
      if (tau <= horizon + 1e-12)
        events.push_back(
            {tau, rt.direction == CrossDir::left_to_right ? 2 : -2});
  }
  std::sort(events.begin(), events.end());

  if (!any_usable) {
    if (max_re0 < 0) {
      sch.verdict = DelayVerdict::stable_all_tau;
    } else {
      sch.verdict = DelayVerdict::unstable_all_tau_beyond_tc;
      sch.tau_critical = 0.0;
    }
    return sch;
  }

  sch.verdict = DelayVerdict::switches;
  sch.first_switch_tau = events.front().first;

  // Track the count; remember where it last sat at zero.
  int last_zero = count == 0 ? 0 : -1; // index into "positions": 0 = before all
  std::vector<int> counts_after(events.size());
  for (size_t k = 0; k < events.size(); ++k) {
    count = std::max(0, count + events[k].second);
    counts_after[k] = count;
    if (count == 0) last_zero = static_cast<int>(k) + 1;
  }
  if (last_zero == -1) {
    sch.tau_critical = 0.0; // positive from tau = 0 on
  } else if (last_zero <= static_cast<int>(events.size()) - 1) {
    const auto& ev = events[static_cast<size_t>(last_zero)];
    if (ev.second > 0) sch.tau_critical = ev.first;
  } // else: count is zero at the horizon -> no critical delay in range
  return sch;
}

std::vector<std::complex<double>> locate_characteristic_roots(
    const QuasiChar& qc, double tau, std::array<double, 4> region, int grid) {
  if (grid < 2) throw invalid_argument_error("grid must be >= 2");
  const auto [re0, re1, im0, im1] = region;
  if (!(re1 > re0) || !(im1 > im0))
    throw invalid_argument_error("degenerate localization region");

  std::vector<std::complex<double>> found;
  auto push_unique = [&](std::complex<double> z) {
    for (const auto& w : found)
      if (std::abs(w - z) < 1e-6) return;
    found.push_back(z);
  };

  for (int ix = 0; ix < grid; ++ix) {
    for (int iy = 0; iy < grid; ++iy) {
      std::complex<double> lam(re0 + (re1 - re0) * ix / (grid - 1),
                               im0 + (im1 - im0) * iy / (grid - 1));
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const std::complex<double> f = qc.eval(lam, tau);
        if (std::abs(f) < 1e-12) {
          ok = true;
          break;
        }
        const std::complex<double> df = qc.eval_deriv(lam, tau);
        if (df == 0.0) break;
        std::complex<double> step = f / df;
        std::complex<double> lam2 = lam - step;
        int halv = 0;
        while (std::abs(qc.eval(lam2, tau)) > std::abs(f) && halv < 40) {
          step *= 0.5;
          lam2 = lam - step;
          ++halv;
        }
        if (std::abs(lam2 - lam) < 1e-14 &&
            std::abs(qc.eval(lam2, tau)) < 1e-10) {
          lam = lam2;
          ok = true;
          break;
        }
        lam = lam2;
      }
      if (!ok && std::abs(qc.eval(lam, tau)) < 1e-10) ok = true;
      if (!ok) continue;
      if (lam.real() < re0 - 1e-9 || lam.real() > re1 + 1e-9 ||
          lam.imag() < im0 - 1e-9 || lam.imag() > im1 + 1e-9)
        continue;
      push_unique(lam);
    }
  }
  std::sort(found.begin(), found.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return found;
}

ContourField contour_field(const QuasiChar& qc, double tau,
                           std::array<double, 4> region, int nx, int ny) {
  if (nx < 2 || ny < 2) throw invalid_argument_error("field needs nx, ny >= 2");
  const auto [re0, re1, im0, im1] = region;
  ContourField f;
  f.region = region;
  f.nx = nx;
  f.ny = ny;
  f.re.reserve(static_cast<size_t>(nx) * ny);
  f.im.reserve(static_cast<size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::complex<double> lam(re0 + (re1 - re0) * ix / (nx - 1),
                                     im0 + (im1 - im0) * iy / (ny - 1));
      const auto v = qc.eval(lam, tau);
      f.re.push_back(v.real());
      f.im.push_back(v.imag());
    }
  }
  return f;
}

}  // namespace hpax
