#include "hpax.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "hpax/delay.hpp"
#include "hpax/equilibria.hpp"
#include "hpax/error.hpp"
#include "hpax/integrate.hpp"
#include "hpax/lyapunov.hpp"
#include "hpax/model.hpp"
#include "hpax/periodic.hpp"
#include "hpax/stability.hpp"

namespace {

thread_local std::string g_last_error;

hpax_status to_status(hpax::errc c) {
  switch (c) {
  case hpax::errc::ok: return HPAX_OK;
  case hpax::errc::invalid_argument: return HPAX_EINVAL;
  case hpax::errc::domain_error: return HPAX_EDOMAIN;
  case hpax::errc::guard_violation: return HPAX_EGUARD;
  case hpax::errc::unsupported_case: return HPAX_EUNSUPPORTED;
  case hpax::errc::no_convergence: return HPAX_ENOCONV;
  case hpax::errc::infeasible_history: return HPAX_EINFEASIBLE;
  case hpax::errc::internal_error: return HPAX_EINTERNAL;
  }
  return HPAX_EINTERNAL;
}

template <typename Fn>
hpax_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HPAX_OK;
  } catch (const hpax::error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HPAX_EINTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return HPAX_EINTERNAL;
  }
}

hpax_status fail_invalid(const char* msg) {
  g_last_error = msg;
  return HPAX_EINVAL;
}

hpax::Params cpp_params(const hpax_params& p) {
  return {p.A, p.p2, p.p3, p.p4, p.p5, p.p6, p.tau};
}

hpax::State cpp_state(const hpax_state& s) { return {s.a, s.r, s.o}; }

hpax_state c_state(const hpax::State& s) { return {s.a, s.r, s.o}; }

hpax::Equilibrium cpp_eq(const hpax_equilibrium& e) {
  hpax::Equilibrium out;
  out.a = e.a;
  out.r = e.r;
  out.o = e.o;
  out.K1 = e.K1;
  out.K2 = e.K2;
  out.K3 = e.K3;
  out.K4 = e.K4;
  return out;
}

void fill_cubic(const hpax::CharCubic& c, hpax_char_cubic* out) {
  out->alpha1 = c.alpha1;
  out->alpha2 = c.alpha2;
  out->alpha3 = c.alpha3;
  out->delta = c.delta;
  for (int i = 0; i < 3; ++i) {
    out->root_re[i] = c.roots[i].real();
    out->root_im[i] = c.roots[i].imag();
  }
}

} // namespace

struct hpax_history {
  hpax::History h;
};
struct hpax_trajectory {
  hpax::Trajectory tr;
};
struct hpax_case_report {
  hpax::CaseReport rep;
};
struct hpax_qc {
  hpax::QuasiChar qc;
};
struct hpax_schedule {
  hpax::SwitchSchedule s;
};
struct hpax_picard {
  hpax::PicardResult res;
  hpax_trajectory traj_view;
};
struct hpax_setup {
  hpax::PeriodicSetup s;
  hpax_history hist_view;
};

extern "C" {

const char* hpax_version(void) { return "1.0.0"; }

void hpax_last_error(char* buf, size_t cap) {
  if (!buf || cap == 0) return;
  const size_t n = std::min(cap - 1, g_last_error.size());
  std::memcpy(buf, g_last_error.data(), n);
  buf[n] = '\0';
}

/* ---- model ---- */

hpax_status hpax_validate_params(const hpax_params* p) {
  if (!p) return fail_invalid("null params");
  return guarded([&] { hpax::validate(cpp_params(*p)); });
}

hpax_status hpax_rhs(const hpax_params* p, const hpax_state* y,
                     double a_delayed, hpax_state* out) {
  if (!p || !y || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = c_state(hpax::rhs(cpp_params(*p), cpp_state(*y), a_delayed));
  });
}

hpax_status hpax_invariant_box(const hpax_params* p, double lo[3], double hi[3]) {
  if (!p || !lo || !hi) return fail_invalid("null argument");
  return guarded([&] {
    const auto box = hpax::invariant_box(cpp_params(*p));
    if (!box) throw hpax::domain_error("invariant box undefined (p3 or p6 = 0)");
    lo[0] = box->a_lo;
    lo[1] = box->r_lo;
    lo[2] = box->o_lo;
    hi[0] = box->a_hi;
    hi[1] = box->r_hi;
    hi[2] = box->o_hi;
  });
}

hpax_status hpax_history_constant(double a0, double r0, double o0,
                                  hpax_history** out) {
  if (!out) return fail_invalid("null out");
  return guarded([&] {
    *out = new hpax_history{hpax::History::constant(a0, r0, o0)};
  });
}

hpax_status hpax_history_quadexp(double a0, double lambda, double r0, double o0,
                                 hpax_history** out) {
  if (!out) return fail_invalid("null out");
  return guarded([&] {
    *out = new hpax_history{hpax::History::quadexp(a0, lambda, r0, o0)};
  });
}

hpax_status hpax_history_hermite(const double* t, const double* v,
                                 const double* d, int n, double r0, double o0,
                                 hpax_history** out) {
  if (!t || !v || !d || !out || n < 2) return fail_invalid("bad hermite spec");
  return guarded([&] {
    *out = new hpax_history{hpax::History::hermite(
        std::vector<double>(t, t + n), std::vector<double>(v, v + n),
        std::vector<double>(d, d + n), r0, o0)};
  });
}

void hpax_history_free(hpax_history* h) { delete h; }

hpax_status hpax_history_kind(const hpax_history* h, int* out) {
  if (!h || !out) return fail_invalid("null argument");
  *out = static_cast<int>(h->h.kind());
  return HPAX_OK;
}

hpax_status hpax_history_value(const hpax_history* h, double t, double* out) {
  if (!h || !out) return fail_invalid("null argument");
  return guarded([&] { *out = h->h.value(t); });
}

hpax_status hpax_history_deriv(const hpax_history* h, double t, double* out) {
  if (!h || !out) return fail_invalid("null argument");
  return guarded([&] { *out = h->h.deriv(t); });
}

hpax_status hpax_history_fitting(const hpax_params* p, const hpax_history* h,
                                 double* residual, int* ok) {
  if (!p || !h || !residual || !ok) return fail_invalid("null argument");
  return guarded([&] {
    *residual = hpax::fitting_residual(cpp_params(*p), h->h);
    *ok = *residual <= 1e-9 ? 1 : 0;
  });
}

/* ---- equilibria ---- */

hpax_status hpax_solve_equilibrium(const hpax_params* p, hpax_equilibrium* out) {
  if (!p || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto eq = hpax::solve_equilibrium(cpp_params(*p));
    *out = {eq.a, eq.r, eq.o, eq.K1, eq.K2, eq.K3, eq.K4};
  });
}

hpax_status hpax_equilibrium_quartic(const hpax_params* p, double* r_out,
                                     int cap, int* n_out) {
  if (!p || !r_out || !n_out || cap < 0) return fail_invalid("null argument");
  return guarded([&] {
    const auto rs = hpax::solve_equilibrium_quartic(cpp_params(*p));
    *n_out = static_cast<int>(rs.size());
    for (int i = 0; i < cap && i < *n_out; ++i) r_out[i] = rs[i];
  });
}

hpax_status hpax_jacobian(const hpax_params* p, const hpax_equilibrium* eq,
                          double out[9]) {
  if (!p || !eq || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto J = hpax::jacobian(cpp_params(*p), cpp_eq(*eq));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = J[i][j];
  });
}

hpax_status hpax_classify_case(const hpax_params* p, const double* r0,
                               hpax_case_report** out) {
  if (!p || !out) return fail_invalid("null argument");
  return guarded([&] {
    std::optional<double> r0_opt;
    if (r0) r0_opt = *r0;
    *out = new hpax_case_report{hpax::classify_case(cpp_params(*p), r0_opt)};
  });
}

void hpax_case_report_free(hpax_case_report* rep) { delete rep; }

hpax_status hpax_case_id(const hpax_case_report* rep, int* out) {
  if (!rep || !out) return fail_invalid("null argument");
  *out = static_cast<int>(rep->rep.id);
  return HPAX_OK;
}

hpax_status hpax_case_n_points(const hpax_case_report* rep, int* out) {
  if (!rep || !out) return fail_invalid("null argument");
  *out = static_cast<int>(rep->rep.fixed_points.size());
  return HPAX_OK;
}

hpax_status hpax_case_point(const hpax_case_report* rep, int i,
                            hpax_state* point, int* cls) {
  if (!rep || !point || !cls) return fail_invalid("null argument");
  if (i < 0 || i >= static_cast<int>(rep->rep.fixed_points.size()))
    return fail_invalid("point index out of range");
  *point = c_state(rep->rep.fixed_points[i].point);
  *cls = static_cast<int>(rep->rep.fixed_points[i].cls);
  return HPAX_OK;
}

hpax_status hpax_case_root_count(const hpax_case_report* rep, int* out) {
  if (!rep || !out) return fail_invalid("null argument");
  *out = rep->rep.root_count;
  return HPAX_OK;
}

hpax_status hpax_case_unbounded(const hpax_case_report* rep, int* out) {
  if (!rep || !out) return fail_invalid("null argument");
  *out = rep->rep.unbounded_equilibrium ? 1 : 0;
  return HPAX_OK;
}

hpax_status hpax_case_overall(const hpax_case_report* rep, int* has, int* cls) {
  if (!rep || !has || !cls) return fail_invalid("null argument");
  *has = rep->rep.overall.has_value() ? 1 : 0;
  *cls = *has ? static_cast<int>(*rep->rep.overall) : 0;
  return HPAX_OK;
}

hpax_status hpax_case_blow_up_time(const hpax_case_report* rep, int* has,
                                   double* t) {
  if (!rep || !has || !t) return fail_invalid("null argument");
  *has = rep->rep.blow_up_time.has_value() ? 1 : 0;
  *t = *has ? *rep->rep.blow_up_time : 0.0;
  return HPAX_OK;
}

hpax_status hpax_blow_up_estimate(const hpax_params* p, double r0, double* out) {
  if (!p || !out) return fail_invalid("null argument");
  return guarded([&] { *out = hpax::blow_up_estimate(cpp_params(*p), r0); });
}

/* ---- stability ---- */

hpax_status hpax_char_cubic_at(const hpax_params* p, const hpax_equilibrium* eq,
                               hpax_char_cubic* out) {
  if (!p || !eq || !out) return fail_invalid("null argument");
  return guarded([&] {
    fill_cubic(hpax::char_cubic(cpp_params(*p), cpp_eq(*eq)), out);
  });
}

hpax_status hpax_char_cubic_from_k(double p3, double p6, double K2, double K3,
                                   hpax_char_cubic* out) {
  if (!out) return fail_invalid("null out");
  return guarded([&] { fill_cubic(hpax::char_cubic_from_k(p3, p6, K2, K3), out); });
}

hpax_status hpax_routh_hurwitz(const hpax_char_cubic* c,
                               hpax_stability_verdict* out) {
  if (!c || !out) return fail_invalid("null argument");
  return guarded([&] {
    hpax::CharCubic cc;
    cc.alpha1 = c->alpha1;
    cc.alpha2 = c->alpha2;
    cc.alpha3 = c->alpha3;
    cc.delta = c->delta;
    for (int i = 0; i < 3; ++i)
      cc.roots[i] = {c->root_re[i], c->root_im[i]};
    const auto v = hpax::routh_hurwitz(cc);
    out->kind = static_cast<int>(v.kind);
    out->alpha1_pos = v.rh.alpha1_pos;
    out->alpha3_pos = v.rh.alpha3_pos;
    out->product = v.rh.product;
    out->max_real_part = v.max_real_part;
  });
}

hpax_status hpax_rh_chains(const hpax_params* p, const hpax_equilibrium* eq,
                           hpax_chain_report* out) {
  if (!p || !eq || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto r = hpax::verify_rh_always_stable(cpp_params(*p), cpp_eq(*eq));
    out->chain1 = r.chain1;
    out->chain2 = r.chain2;
    out->chain3 = r.chain3;
    out->all_hold = r.all_hold;
    out->agrees_with_verdict = r.agrees_with_verdict;
  });
}

/* ---- lyapunov ---- */

hpax_status hpax_lyapunov_value(const hpax_equilibrium* eq, const hpax_state* y,
                                double* out) {
  if (!eq || !y || !out) return fail_invalid("null argument");
  return guarded([&] { *out = hpax::lyapunov_value(cpp_eq(*eq), cpp_state(*y)); });
}

hpax_status hpax_lyapunov_constants(const hpax_params* p,
                                    const hpax_equilibrium* eq,
                                    hpax_lyapunov_report* out) {
  if (!p || !eq || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto r = hpax::lyapunov_constants(cpp_params(*p), cpp_eq(*eq));
    out->hypotheses_ok = r.hypotheses_ok;
    out->min_at_p6 = r.min_at_p6;
    out->condition_ok = r.condition_ok;
    out->applicable = r.applicable;
    out->minv = r.minv;
    out->alpha = r.alpha;
    out->beta = r.beta;
    out->gamma = r.gamma;
    out->basin = r.basin;
    out->B = r.B;
    out->large_p4_branch = r.large_p4_branch;
    out->has_A0 = r.A0.has_value();
    out->A0 = r.A0.value_or(0.0);
    out->has_A_window = r.A1.has_value();
    out->A_min = r.A_min.value_or(0.0);
    out->F_min = r.F_min.value_or(0.0);
    out->A1 = r.A1.value_or(0.0);
    out->A2 = r.A2.value_or(0.0);
    out->gamma_cap_corrected = r.gamma_cap_corrected;
    out->gamma_cap_printed = r.gamma_cap_printed;
  });
}

hpax_status hpax_lyapunov_F(const hpax_params* p, double amp, double* out) {
  if (!p || !out) return fail_invalid("null argument");
  return guarded([&] { *out = hpax::lyapunov_F(cpp_params(*p), amp); });
}

hpax_status hpax_verify_decay(const hpax_params* p, const hpax_equilibrium* eq,
                              const hpax_state* initial, double t_end, double dt,
                              hpax_decay_report* out) {
  if (!p || !eq || !initial || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto r = hpax::verify_decay(cpp_params(*p), cpp_eq(*eq),
                                      cpp_state(*initial), t_end, dt);
    out->w0 = r.w0;
    out->w_final = r.w_final;
    out->converged = r.converged;
    out->monotone = r.monotone;
    out->inequality_ok = r.inequality_ok;
    out->max_inequality_gap = r.max_inequality_gap;
  });
}

/* ---- delay ---- */

namespace {
hpax::QcVariant cpp_variant(int v) {
  return v == HPAX_QC_K3_DELAYED_ONLY ? hpax::QcVariant::k3_delayed_only
                                      : hpax::QcVariant::k3_in_both;
}
} // namespace

hpax_status hpax_qc_build(const hpax_params* p, const hpax_equilibrium* eq,
                          int variant, hpax_qc** out) {
  if (!p || !eq || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = new hpax_qc{
        hpax::make_quasi_char(cpp_params(*p), cpp_eq(*eq), cpp_variant(variant))};
  });
}

hpax_status hpax_qc_inject(double p3, double p6, double K2, double K3,
                           int variant, hpax_qc** out) {
  if (!out) return fail_invalid("null out");
  return guarded([&] {
    *out = new hpax_qc{
        hpax::make_quasi_char_injected(p3, p6, K2, K3, cpp_variant(variant))};
  });
}

void hpax_qc_free(hpax_qc* qc) { delete qc; }

hpax_status hpax_qc_coeffs(const hpax_qc* qc, double P_out[4], double Q_out[2],
                           double b_out[3], double* delta0) {
  if (!qc || !P_out || !Q_out || !b_out || !delta0)
    return fail_invalid("null argument");
  for (int i = 0; i < 4; ++i) P_out[i] = qc->qc.P[i];
  for (int i = 0; i < 2; ++i) Q_out[i] = qc->qc.Q[i];
  for (int i = 0; i < 3; ++i) b_out[i] = qc->qc.b[i];
  *delta0 = qc->qc.delta0;
  return HPAX_OK;
}

hpax_status hpax_qc_eval(const hpax_qc* qc, double lam_re, double lam_im,
                         double tau, double* out_re, double* out_im) {
  if (!qc || !out_re || !out_im) return fail_invalid("null argument");
  return guarded([&] {
    const auto v = qc->qc.eval({lam_re, lam_im}, tau);
    *out_re = v.real();
    *out_im = v.imag();
  });
}

hpax_status hpax_f_function(const hpax_qc* qc, double y, double* out) {
  if (!qc || !out) return fail_invalid("null argument");
  return guarded([&] { *out = hpax::f_function(qc->qc, y); });
}

hpax_status hpax_theorem_checks(const hpax_qc* qc, int flags[6]) {
  if (!qc || !flags) return fail_invalid("null argument");
  return guarded([&] {
    const auto t = hpax::theorem_checks(qc->qc);
    flags[0] = t.no_common_imag_zero;
    flags[1] = t.real_symmetry;
    flags[2] = t.nonzero_at_origin;
    flags[3] = t.finite_rhp_roots;
    flags[4] = t.finitely_many_crossings;
    flags[5] = t.all_ok;
  });
}

hpax_status hpax_switch_schedule(const hpax_qc* qc, int n_max,
                                 hpax_schedule** out) {
  if (!qc || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = new hpax_schedule{hpax::switch_schedule(qc->qc, n_max)};
  });
}

void hpax_schedule_free(hpax_schedule* s) { delete s; }

hpax_status hpax_schedule_n_roots(const hpax_schedule* s, int* out) {
  if (!s || !out) return fail_invalid("null argument");
  *out = static_cast<int>(s->s.roots.size());
  return HPAX_OK;
}

hpax_status hpax_schedule_root(const hpax_schedule* s, int i,
                               hpax_crossing* out) {
  if (!s || !out) return fail_invalid("null argument");
  if (i < 0 || i >= static_cast<int>(s->s.roots.size()))
    return fail_invalid("root index out of range");
  const auto& rt = s->s.roots[i];
  out->x = rt.x;
  out->v = rt.v;
  out->sin_vtau = rt.sin_vtau;
  out->cos_vtau = rt.cos_vtau;
  out->theta = rt.theta;
  out->fprime = rt.fprime;
  out->direction = static_cast<int>(rt.direction);
  out->proviso_ok = rt.proviso_ok;
  out->n_taus = static_cast<int>(rt.taus.size());
  out->max_residual = rt.max_residual;
  return HPAX_OK;
}

hpax_status hpax_schedule_tau(const hpax_schedule* s, int i, int n, double* out) {
  if (!s || !out) return fail_invalid("null argument");
  if (i < 0 || i >= static_cast<int>(s->s.roots.size()))
    return fail_invalid("root index out of range");
  const auto& taus = s->s.roots[i].taus;
  if (n < 0 || n >= static_cast<int>(taus.size()))
    return fail_invalid("tau index out of range");
  *out = taus[n];
  return HPAX_OK;
}

hpax_status hpax_schedule_verdict(const hpax_schedule* s, int* out) {
  if (!s || !out) return fail_invalid("null argument");
  *out = static_cast<int>(s->s.verdict);
  return HPAX_OK;
}

hpax_status hpax_schedule_first_switch(const hpax_schedule* s, int* has,
                                       double* tau) {
  if (!s || !has || !tau) return fail_invalid("null argument");
  *has = s->s.first_switch_tau.has_value();
  *tau = s->s.first_switch_tau.value_or(0.0);
  return HPAX_OK;
}

hpax_status hpax_schedule_tau_critical(const hpax_schedule* s, int* has,
                                       double* tau) {
  if (!s || !has || !tau) return fail_invalid("null argument");
  *has = s->s.tau_critical.has_value();
  *tau = s->s.tau_critical.value_or(0.0);
  return HPAX_OK;
}

hpax_status hpax_schedule_flags(const hpax_schedule* s, int* has_multiple_root,
                                int* proviso_violation) {
  if (!s || !has_multiple_root || !proviso_violation)
    return fail_invalid("null argument");
  *has_multiple_root = s->s.has_multiple_root;
  *proviso_violation = s->s.proviso_violation;
  return HPAX_OK;
}

hpax_status hpax_schedule_b(const hpax_schedule* s, double b_out[3],
                            double* delta0) {
  if (!s || !b_out || !delta0) return fail_invalid("null argument");
  for (int i = 0; i < 3; ++i) b_out[i] = s->s.b[i];
  *delta0 = s->s.delta0;
  return HPAX_OK;
}

hpax_status hpax_schedule_tau0_roots(const hpax_schedule* s, double re_out[3],
                                     double im_out[3]) {
  if (!s || !re_out || !im_out) return fail_invalid("null argument");
  for (int i = 0; i < 3; ++i) {
    re_out[i] = s->s.tau0_roots[i].real();
    im_out[i] = s->s.tau0_roots[i].imag();
  }
  return HPAX_OK;
}

hpax_status hpax_locate_roots(const hpax_qc* qc, double tau,
                              const double region[4], int grid, double* out_re,
                              double* out_im, int cap, int* n_found) {
  if (!qc || !region || !out_re || !out_im || !n_found || cap < 0)
    return fail_invalid("null argument");
  return guarded([&] {
    const auto roots = hpax::locate_characteristic_roots(
        qc->qc, tau, {region[0], region[1], region[2], region[3]}, grid);
    *n_found = static_cast<int>(roots.size());
    for (int i = 0; i < cap && i < *n_found; ++i) {
      out_re[i] = roots[i].real();
      out_im[i] = roots[i].imag();
    }
  });
}

hpax_status hpax_contour_field(const hpax_qc* qc, double tau,
                               const double region[4], int nx, int ny,
                               double* out_re, double* out_im) {
  if (!qc || !region || !out_re || !out_im) return fail_invalid("null argument");
  return guarded([&] {
    const auto f = hpax::contour_field(
        qc->qc, tau, {region[0], region[1], region[2], region[3]}, nx, ny);
    std::copy(f.re.begin(), f.re.end(), out_re);
    std::copy(f.im.begin(), f.im.end(), out_im);
  });
}

/* ---- integrate ---- */

hpax_status hpax_integrate_ode(const hpax_params* p, const hpax_state* y0,
                               double t_end, double dt, hpax_trajectory** out) {
  if (!p || !y0 || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = new hpax_trajectory{
        hpax::integrate_ode(cpp_params(*p), cpp_state(*y0), t_end, dt)};
  });
}

hpax_status hpax_integrate_dde(const hpax_params* p, const hpax_history* h,
                               double t_end, int steps_per_delay,
                               hpax_trajectory** out) {
  if (!p || !h || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = new hpax_trajectory{
        hpax::integrate_dde(cpp_params(*p), h->h, t_end, steps_per_delay)};
  });
}

void hpax_trajectory_free(hpax_trajectory* tr) { delete tr; }

hpax_status hpax_trajectory_size(const hpax_trajectory* tr, int* out) {
  if (!tr || !out) return fail_invalid("null argument");
  *out = static_cast<int>(tr->tr.t.size());
  return HPAX_OK;
}

hpax_status hpax_trajectory_node(const hpax_trajectory* tr, int i, double* t,
                                 hpax_state* y, hpax_state* dy) {
  if (!tr || !t || !y || !dy) return fail_invalid("null argument");
  if (i < 0 || i >= static_cast<int>(tr->tr.t.size()))
    return fail_invalid("node index out of range");
  *t = tr->tr.t[i];
  *y = c_state(tr->tr.y[i]);
  *dy = c_state(tr->tr.dy[i]);
  return HPAX_OK;
}

hpax_status hpax_trajectory_at(const hpax_trajectory* tr, double t,
                               hpax_state* out) {
  if (!tr || !out) return fail_invalid("null argument");
  return guarded([&] { *out = c_state(tr->tr.at(t)); });
}

hpax_status hpax_trajectory_flags(const hpax_trajectory* tr, int* has_nonneg,
                                  double* nonneg_t, int* has_bounds,
                                  double* bounds_t, int* has_blow_up,
                                  double* blow_up_t, int* fitting_ok) {
  if (!tr || !has_nonneg || !nonneg_t || !has_bounds || !bounds_t ||
      !has_blow_up || !blow_up_t || !fitting_ok)
    return fail_invalid("null argument");
  const auto& f = tr->tr.flags;
  *has_nonneg = f.nonneg_violation.has_value();
  *nonneg_t = f.nonneg_violation.value_or(0.0);
  *has_bounds = f.bounds_entry_time.has_value();
  *bounds_t = f.bounds_entry_time.value_or(0.0);
  *has_blow_up = f.blow_up_time.has_value();
  *blow_up_t = f.blow_up_time.value_or(0.0);
  *fitting_ok = f.fitting_ok;
  return HPAX_OK;
}

hpax_status hpax_picard_run(const hpax_params* p, const hpax_history* h,
                        int windows, int max_sweeps, int grid_per_window,
                        hpax_picard** out) {
  if (!p || !h || !out) return fail_invalid("null argument");
  return guarded([&] {
    auto* pc = new hpax_picard{
        hpax::picard_oracle(cpp_params(*p), h->h, windows, max_sweeps,
                            grid_per_window),
        {}};
    pc->traj_view.tr = pc->res.traj;
    *out = pc;
  });
}

void hpax_picard_free(hpax_picard* pc) { delete pc; }

hpax_status hpax_picard_n_windows(const hpax_picard* pc, int* out) {
  if (!pc || !out) return fail_invalid("null argument");
  *out = static_cast<int>(pc->res.envelopes.size());
  return HPAX_OK;
}

hpax_status hpax_picard_envelope(const hpax_picard* pc, int i, double env[6],
                                 int* sweeps, int* bracket_ok) {
  if (!pc || !env || !sweeps || !bracket_ok) return fail_invalid("null argument");
  if (i < 0 || i >= static_cast<int>(pc->res.envelopes.size()))
    return fail_invalid("window index out of range");
  const auto& e = pc->res.envelopes[i];
  env[0] = e.a_lo;
  env[1] = e.a_hi;
  env[2] = e.r_lo;
  env[3] = e.r_hi;
  env[4] = e.o_lo;
  env[5] = e.o_hi;
  *sweeps = e.sweeps;
  *bracket_ok = e.bracket_ok;
  return HPAX_OK;
}

hpax_status hpax_picard_trajectory(const hpax_picard* pc,
                                   const hpax_trajectory** out) {
  if (!pc || !out) return fail_invalid("null argument");
  *out = &pc->traj_view;
  return HPAX_OK;
}

hpax_status hpax_explicit_solution(const hpax_params* p, const hpax_state* y0,
                                   double t, hpax_state* out) {
  if (!p || !y0 || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = c_state(hpax::explicit_case_solution(cpp_params(*p), cpp_state(*y0), t));
  });
}

/* ---- periodic ---- */

hpax_status hpax_build_periodic_setup(const hpax_params* p, const double* r0,
                                      const int* history_kind, hpax_setup** out) {
  if (!p || !out) return fail_invalid("null argument");
  return guarded([&] {
    std::optional<double> r0_opt;
    if (r0) r0_opt = *r0;
    std::optional<hpax::History::Kind> kind;
    if (history_kind) {
      switch (*history_kind) {
      case HPAX_HISTORY_CONSTANT: kind = hpax::History::Kind::constant; break;
      case HPAX_HISTORY_QUADEXP: kind = hpax::History::Kind::quadexp; break;
      case HPAX_HISTORY_HERMITE: kind = hpax::History::Kind::hermite; break;
      default: throw hpax::invalid_argument_error("unknown history kind");
      }
    }
    auto* s = new hpax_setup{
        hpax::build_periodic_setup(cpp_params(*p), r0_opt, kind), {}};
    s->hist_view.h = s->s.history;
    *out = s;
  });
}

void hpax_setup_free(hpax_setup* s) { delete s; }

hpax_status hpax_setup_values(const hpax_setup* s, double* r0, double* o0,
                              double* a_tau_0, int* fallback_used,
                              double* fitting_residual) {
  if (!s || !r0 || !o0 || !a_tau_0 || !fallback_used || !fitting_residual)
    return fail_invalid("null argument");
  *r0 = s->s.r0;
  *o0 = s->s.o0;
  *a_tau_0 = s->s.a_tau_0;
  *fallback_used = s->s.fallback_used;
  *fitting_residual = s->s.fitting_residual;
  return HPAX_OK;
}

hpax_status hpax_setup_history(const hpax_setup* s, const hpax_history** out) {
  if (!s || !out) return fail_invalid("null argument");
  *out = &s->hist_view;
  return HPAX_OK;
}

hpax_status hpax_verify_periodicity(const hpax_trajectory* tr, double period,
                                    double t_start, int samples,
                                    hpax_periodicity* out) {
  if (!tr || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto r = hpax::verify_periodicity(tr->tr, period, t_start, samples);
    out->residual = r.residual;
    out->amplitude = r.amplitude;
    out->periodic = r.periodic;
  });
}

hpax_status hpax_estimate_period(const hpax_trajectory* tr, double t_start,
                                 int* has, double* period, double* peak) {
  if (!tr || !has || !period || !peak) return fail_invalid("null argument");
  return guarded([&] {
    const auto r = hpax::estimate_period(tr->tr, t_start);
    *has = r.period.has_value();
    *period = r.period.value_or(0.0);
    *peak = r.peak;
  });
}

} /* extern "C" */
