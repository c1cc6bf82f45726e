#include "hpax/equilibria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hpax/error.hpp"
#include "hpax/poly.hpp"

namespace hpax {

namespace {

constexpr double kNonHypBand = 1e-10;

// Squared product s^2 = (a r)^2 along nullcline 1, as a function of r.
double f1_sq(const Params& p, double r) {
  const double z = std::sqrt(1.0 + 4.0 * p.p2 * p.A * r / p.p3) - 1.0;
  return z * z / (4.0 * p.p2 * p.p2);
}

double f1_sq_deriv(const Params& p, double r) {
  const double zf = std::sqrt(1.0 + 4.0 * p.p2 * p.A * r / p.p3);
  return (zf - 1.0) * p.A / (p.p2 * p.p3 * zf);
}

// Squared product along nullcline 2.
double f2_sq(const Params& p, double r) {
  return p.p4 * (p.p6 * r - p.p5) / (1.0 + p.p5 - p.p6 * r);
}

double f2_sq_deriv(const Params& p, double r) {
  const double den = 1.0 + p.p5 - p.p6 * r;
  return p.p4 * p.p6 / (den * den);
}

PointClass classify_eigs(const std::vector<std::complex<double>>& eigs) {
  double max_re = -1e300;
  bool near_zero = false;
  for (const auto& z : eigs) {
    max_re = std::max(max_re, z.real());
    if (std::abs(z.real()) <= kNonHypBand) near_zero = true;
  }
  if (near_zero) return PointClass::non_hyperbolic;
  return max_re < 0.0 ? PointClass::stable_node : PointClass::saddle;
}

std::vector<std::complex<double>> jacobian_eigs(const Params& p,
                                                const Equilibrium& eq) {
  const auto J = jacobian(p, eq);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = J[i][j];
  Eigen::EigenSolver<Eigen::Matrix3d> es(m, false);
  std::vector<std::complex<double>> out(3);
  for (int i = 0; i < 3; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

} // namespace

Equilibrium equilibrium_from_r(const Params& p, double r) {
  Equilibrium eq;
  eq.r = r;
  if (p.p2 > 0.0) {
    const double z = std::sqrt(1.0 + 4.0 * p.p2 * p.A * r / p.p3) - 1.0;
    eq.a = r > 0.0 ? z / (2.0 * p.p2 * r) : p.A / p.p3;
  } else {
    eq.a = p.A / p.p3;
  }
  eq.o = eq.a;
  const double s = eq.a * eq.r;
  const double den1 = 1.0 + p.p2 * s;
  const double den2 = p.p4 + s * s;
  eq.K1 = p.A * p.p2 * eq.a / (den1 * den1);
  eq.K3 = p.A * p.p2 * eq.r / (den1 * den1);
  if (den2 > 0.0) {
    eq.K2 = 2.0 * p.p4 * eq.r * eq.a * eq.a / (den2 * den2);
    eq.K4 = 2.0 * p.p4 * eq.r * eq.r * eq.a / (den2 * den2);
  }
  return eq;
}

Equilibrium solve_equilibrium(const Params& p) {
  validate(p);
  if (!(p.A > 0 && p.p2 > 0 && p.p3 > 0 && p.p4 > 0 && p.p5 > 0 && p.p6 > 0))
    throw domain_error("solve_equilibrium needs A > 0 and p2..p6 > 0");

  const double band_lo = p.p5 / p.p6;
  const double band_hi = (p.p5 + 1.0) / p.p6;
  const double width = band_hi - band_lo;
  auto g = [&](double r) { return f1_sq(p, r) - f2_sq(p, r); };

  double lo = band_lo + 1e-12 * width;
  double hi = band_hi - 1e-12 * width;
  if (g(lo) <= 0.0) lo = band_lo; // root sits inside the nudge margin (tiny A)
  if (!(g(lo) > 0.0 && g(hi) < 0.0))
    throw no_convergence("equilibrium bracket failed");

  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double gp = f1_sq_deriv(p, r) - f2_sq_deriv(p, r);
    const double step = g(r) / gp;
    const double cand = r - step;
    if (std::isfinite(cand) && cand > band_lo && cand < band_hi) r = cand;
  }

  Equilibrium eq = equilibrium_from_r(p, r);

  // Cross-check a* against the nullcline-2 form.
  const double e1 = p.p6 * r - p.p5;
  const double e2 = 1.0 + p.p5 - p.p6 * r;
  const double a_alt = std::sqrt(p.p4 * e1 / e2) / r;
  if (std::abs(a_alt - eq.a) > 1e-9 * (1.0 + std::abs(eq.a)))
    throw internal_error("equilibrium a-form mismatch");

  // Cross-check K coefficients against the r*-parameterized forms.
  const double sq4e1 = std::sqrt(p.p4 * e1);
  const double K2_alt = (2.0 / r) * e1 * e2;
  const double K3_alt = p.p2 * p.p3 * sq4e1 / (std::sqrt(e2) + p.p2 * sq4e1);
  const double K4_alt = (2.0 * r / std::sqrt(p.p4)) * std::pow(e2, 1.5) * std::sqrt(e1);
  const double K1_alt = (eq.a / r) * K3_alt;
  auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-8 * (1.0 + std::abs(x));
  };
  if (!close(eq.K1, K1_alt) || !close(eq.K2, K2_alt) || !close(eq.K3, K3_alt) ||
      !close(eq.K4, K4_alt))
    throw internal_error("equilibrium K-form mismatch");

  // Structural bounds on the linearization coefficients.
  const double k2_cap =
      2.0 * p.p6 * std::pow(std::sqrt(1.0 + p.p5) - std::sqrt(p.p5), 2.0);
  if (eq.K2 > k2_cap * (1.0 + 1e-12) || eq.K3 > p.p3 * (1.0 + 1e-12))
    throw internal_error("equilibrium K-bound violated");

  return eq;
}

std::vector<double> solve_equilibrium_quartic(const Params& p) {
  validate(p);
  if (!(p.A > 0 && p.p2 > 0 && p.p3 > 0 && p.p6 > 0))
    throw domain_error("quartic route needs A, p2, p3, p6 > 0");
  const double C1 =
      4.0 * p.p2 * (p.p2 * p.p3 * p.p4 * p.p6 - p.A * (p.p5 + 1.0)) / (p.p3 * p.p6);
  const double C2 = 8.0 * p.p2 * p.p2 * p.p4;
  const double C3 = 16.0 * p.A * std::pow(p.p2, 3) * p.p4 * p.p5 / (p.p3 * p.p6);
  std::vector<double> rs;
  for (double z : real_roots({-C3, C2, C1, 2.0, 1.0}))
    if (z >= 0.0) rs.push_back(p.p3 * z * (z + 2.0) / (4.0 * p.p2 * p.A));
  std::sort(rs.begin(), rs.end());
  return rs;
}

std::array<std::array<double, 3>, 3> jacobian(const Params& p,
                                              const Equilibrium& eq) {
  return {{{-p.p3, -eq.K1, -eq.K3},
           {0.0, -p.p6 + eq.K2, eq.K4},
           {1.0, 0.0, -1.0}}};
}

std::array<std::array<double, 3>, 3> fd_jacobian(const Params& p,
                                                 const Equilibrium& eq,
                                                 double h) {
  std::array<std::array<double, 3>, 3> J{};
  const State base = eq.state();
  for (int j = 0; j < 3; ++j) {
    State yp = base, ym = base;
    double* fp = j == 0 ? &yp.a : j == 1 ? &yp.r : &yp.o;
    double* fm = j == 0 ? &ym.a : j == 1 ? &ym.r : &ym.o;
    *fp += h;
    *fm -= h;
    const State dp = rhs(p, yp, yp.a);
    const State dm = rhs(p, ym, ym.a);
    J[0][j] = (dp.a - dm.a) / (2.0 * h);
    J[1][j] = (dp.r - dm.r) / (2.0 * h);
    J[2][j] = (dp.o - dm.o) / (2.0 * h);
  }
  return J;
}

CaseReport classify_case(const Params& p, std::optional<double> r0) {
  validate(p);
  CaseReport rep;

  auto try_blow_up_time = [&]() {
    if (r0 && *r0 > 0 && p.A > 0 && p.p4 > 0)
      rep.blow_up_time = blow_up_estimate(p, *r0);
  };

  if (p.A == 0.0) {
    rep.id = CaseId::A_zero;
    if (p.p6 > 0.0) {
      const PointClass cls = (p.p3 > 0.0) ? PointClass::stable_node
                                          : PointClass::non_hyperbolic;
      rep.fixed_points.push_back({{0.0, p.p5 / p.p6, 0.0}, cls});
      rep.overall = cls;
    } else {
      rep.unbounded_equilibrium = p.p5 > 0.0;
      rep.overall = p.p5 > 0.0 ? PointClass::blow_up : PointClass::non_hyperbolic;
    }
    return rep;
  }

  if (p.p5 == 0.0 && p.p6 == 0.0) {
    rep.id = CaseId::p6_p5_zero;
    rep.overall = PointClass::blow_up;
    if (p.p3 > 0.0)
      rep.fixed_points.push_back(
          {{p.A / p.p3, 0.0, p.A / p.p3}, PointClass::blow_up});
    try_blow_up_time();
    return rep;
  }

  if (p.p2 == 0.0 && p.p4 == 0.0) {
    rep.id = CaseId::p2_p4_zero;
    rep.overall = PointClass::explicit_solution;
    if (p.p3 > 0.0 && p.p6 > 0.0)
      rep.fixed_points.push_back(
          {{p.A / p.p3, (1.0 + p.p5) / p.p6, p.A / p.p3},
           PointClass::explicit_solution});
    return rep;
  }

  if (p.p6 == 0.0) {
    rep.id = CaseId::p6_zero;
    rep.unbounded_equilibrium = true;
    rep.overall = PointClass::blow_up;
    try_blow_up_time();
    return rep;
  }

  if (p.p5 == 0.0) {
    rep.id = CaseId::p5_zero;
    // Boundary point with r = 0.
    Equilibrium bnd = equilibrium_from_r(p, 0.0);
    rep.fixed_points.push_back(
        {bnd.state(), classify_eigs(jacobian_eigs(p, bnd))});
    // Interior branch: cubic in a.
    if (p.p2 > 0.0 && p.p3 > 0.0) {
      const double aa = p.A / p.p3;
      const std::vector<double> cub = {
          (p.p6 / p.p2) * aa * aa,
          -2.0 * p.A * p.p6 / (p.p2 * p.p3),
          p.p6 * (1.0 + p.p2 * p.p2 * p.p4) / p.p2 - aa,
          1.0,
      };
      for (double a : real_roots(cub)) {
        if (!(a > 0.0 && a < aa)) continue;
        const double r = (p.A - p.p3 * a) / (p.p2 * p.p3 * a * a);
        if (!(r > 0.0)) continue;
        ++rep.root_count;
        Equilibrium eq = equilibrium_from_r(p, r);
        rep.fixed_points.push_back(
            {eq.state(), classify_eigs(jacobian_eigs(p, eq))});
      }
    }
    rep.overall = rep.fixed_points.front().cls;
    return rep;
  }

  if (p.p4 == 0.0) {
    rep.id = CaseId::p4_zero;
    const double r = (1.0 + p.p5) / p.p6; // saturated uptake branch
    Equilibrium eq = equilibrium_from_r(p, r);
    const PointClass cls = classify_eigs(jacobian_eigs(p, eq));
    rep.fixed_points.push_back({eq.state(), cls});
    rep.overall = cls;
    return rep;
  }

  if (p.p3 == 0.0) {
    rep.id = CaseId::p3_zero;
    rep.unbounded_equilibrium = true;
    rep.overall = PointClass::non_hyperbolic;
    return rep;
  }

  if (p.p2 == 0.0) {
    rep.id = CaseId::p2_zero;
    const double aa = p.A / p.p3;
    const double k = (p.p3 / p.A) * (p.p3 / p.A);
    const std::vector<double> cub = {
        -(p.p4 * p.p5 / p.p6) * k,
        p.p4 * k,
        -(1.0 + p.p5) / p.p6,
        1.0,
    };
    const double lo = p.p5 / p.p6, hi = (1.0 + p.p5) / p.p6;
    for (double r : real_roots(cub)) {
      if (!(r > lo + 1e-14 && r < hi - 1e-14)) continue;
      ++rep.root_count;
      Equilibrium eq = equilibrium_from_r(p, r);
      PointClass cls;
      if (std::abs(eq.K2 - p.p6) <= kNonHypBand)
        cls = PointClass::non_hyperbolic;
      else
        cls = eq.K2 < p.p6 ? PointClass::stable_node : PointClass::saddle;
      rep.fixed_points.push_back({{aa, r, aa}, cls});
    }
    return rep;
  }

  rep.id = CaseId::generic;
  Equilibrium eq = solve_equilibrium(p);
  const PointClass cls = classify_eigs(jacobian_eigs(p, eq));
  rep.fixed_points.push_back({eq.state(), cls});
  rep.root_count = 1;
  rep.overall = cls;
  return rep;
}

double blow_up_estimate(const Params& p, double r0) {
  if (p.p6 != 0.0) throw domain_error("finite-time estimate needs p6 = 0");
  if (!(r0 > 0 && p.A > 0 && p.p4 > 0))
    throw domain_error("finite-time estimate needs r0 > 0, A > 0, p4 > 0");
  return (p.p4 / r0) * (p.p3 / p.A) * (p.p3 / p.A);
}

}  // namespace hpax
