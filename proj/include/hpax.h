/* C interface to the hpax core: delayed three-field axis model analysis.
 * All functions return hpax_status; outputs go through pointers. Handle
 * types are opaque; every *_new/_build function has a matching *_free.
 * hpax_last_error copies a thread-local message for the last failure. */
#ifndef HPAX_H
#define HPAX_H

#include <stddef.h>

#if defined(_WIN32)
#define HPAX_API __declspec(dllexport)
#else
#define HPAX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hpax_status {
  HPAX_OK = 0,
  HPAX_EINVAL = 1,
  HPAX_EDOMAIN = 2,
  HPAX_EGUARD = 3,
  HPAX_EUNSUPPORTED = 4,
  HPAX_ENOCONV = 5,
  HPAX_EINFEASIBLE = 6,
  HPAX_EINTERNAL = 7,
} hpax_status;

typedef struct hpax_params {
  double A, p2, p3, p4, p5, p6, tau;
} hpax_params;

typedef struct hpax_state {
  double a, r, o;
} hpax_state;

typedef struct hpax_equilibrium {
  double a, r, o;
  double K1, K2, K3, K4;
} hpax_equilibrium;

typedef struct hpax_char_cubic {
  double alpha1, alpha2, alpha3;
  double delta;
  double root_re[3], root_im[3];
} hpax_char_cubic;

enum {
  HPAX_VERDICT_STABLE = 0,
  HPAX_VERDICT_UNSTABLE = 1,
  HPAX_VERDICT_INCONCLUSIVE = 2,
};

typedef struct hpax_stability_verdict {
  int kind; /* HPAX_VERDICT_* */
  int alpha1_pos, alpha3_pos, product;
  double max_real_part;
} hpax_stability_verdict;

typedef struct hpax_chain_report {
  int chain1, chain2, chain3;
  int all_hold;
  int agrees_with_verdict;
} hpax_chain_report;

enum {
  HPAX_CASE_GENERIC = 0,
  HPAX_CASE_A_ZERO = 1,
  HPAX_CASE_P2_ZERO = 2,
  HPAX_CASE_P3_ZERO = 3,
  HPAX_CASE_P4_ZERO = 4,
  HPAX_CASE_P2_P4_ZERO = 5,
  HPAX_CASE_P5_ZERO = 6,
  HPAX_CASE_P6_P5_ZERO = 7,
  HPAX_CASE_P6_ZERO = 8,
};

enum {
  HPAX_CLASS_STABLE_NODE = 0,
  HPAX_CLASS_SADDLE = 1,
  HPAX_CLASS_NON_HYPERBOLIC = 2,
  HPAX_CLASS_BLOW_UP = 3,
  HPAX_CLASS_EXPLICIT_SOLUTION = 4,
};

typedef struct hpax_lyapunov_report {
  int hypotheses_ok, min_at_p6, condition_ok, applicable;
  double minv, alpha, beta, gamma, basin;
  double B;
  int large_p4_branch;
  int has_A0;
  double A0;
  int has_A_window;
  double A_min, F_min, A1, A2;
  double gamma_cap_corrected, gamma_cap_printed;
} hpax_lyapunov_report;

typedef struct hpax_decay_report {
  double w0, w_final;
  int converged, monotone, inequality_ok;
  double max_inequality_gap;
} hpax_decay_report;

enum {
  HPAX_HISTORY_CONSTANT = 0,
  HPAX_HISTORY_QUADEXP = 1,
  HPAX_HISTORY_HERMITE = 2,
};

enum {
  HPAX_QC_K3_IN_BOTH = 0,
  HPAX_QC_K3_DELAYED_ONLY = 1,
};

enum {
  HPAX_DIR_LEFT_TO_RIGHT = 0,
  HPAX_DIR_RIGHT_TO_LEFT = 1,
};

enum {
  HPAX_DELAY_STABLE_ALL_TAU = 0,
  HPAX_DELAY_SWITCHES = 1,
  HPAX_DELAY_UNSTABLE_BEYOND_TC = 2,
};

typedef struct hpax_crossing {
  double x, v;
  double sin_vtau, cos_vtau, theta;
  double fprime;
  int direction; /* HPAX_DIR_* */
  int proviso_ok;
  int n_taus;
  double max_residual;
} hpax_crossing;

typedef struct hpax_periodicity {
  double residual, amplitude;
  int periodic;
} hpax_periodicity;

typedef struct hpax_history hpax_history;
typedef struct hpax_trajectory hpax_trajectory;
typedef struct hpax_case_report hpax_case_report;
typedef struct hpax_qc hpax_qc;
typedef struct hpax_schedule hpax_schedule;
typedef struct hpax_picard hpax_picard;
typedef struct hpax_setup hpax_setup;

HPAX_API const char* hpax_version(void);
HPAX_API void hpax_last_error(char* buf, size_t cap);

/* ---- model ---- */
HPAX_API hpax_status hpax_validate_params(const hpax_params* p);
HPAX_API hpax_status hpax_rhs(const hpax_params* p, const hpax_state* y,
                              double a_delayed, hpax_state* out);
HPAX_API hpax_status hpax_invariant_box(const hpax_params* p, double lo[3],
                                        double hi[3]);

HPAX_API hpax_status hpax_history_constant(double a0, double r0, double o0,
                                           hpax_history** out);
HPAX_API hpax_status hpax_history_quadexp(double a0, double lambda, double r0,
                                          double o0, hpax_history** out);
HPAX_API hpax_status hpax_history_hermite(const double* t, const double* v,
                                          const double* d, int n, double r0,
                                          double o0, hpax_history** out);
HPAX_API void hpax_history_free(hpax_history* h);
HPAX_API hpax_status hpax_history_kind(const hpax_history* h, int* out);
HPAX_API hpax_status hpax_history_value(const hpax_history* h, double t,
                                        double* out);
HPAX_API hpax_status hpax_history_deriv(const hpax_history* h, double t,
                                        double* out);
HPAX_API hpax_status hpax_history_fitting(const hpax_params* p,
                                          const hpax_history* h,
                                          double* residual, int* ok);

/* ---- equilibria ---- */
HPAX_API hpax_status hpax_solve_equilibrium(const hpax_params* p,
                                            hpax_equilibrium* out);
HPAX_API hpax_status hpax_equilibrium_quartic(const hpax_params* p, double* r_out,
                                              int cap, int* n_out);
HPAX_API hpax_status hpax_jacobian(const hpax_params* p,
                                   const hpax_equilibrium* eq, double out[9]);
HPAX_API hpax_status hpax_classify_case(const hpax_params* p, const double* r0,
                                        hpax_case_report** out);
HPAX_API void hpax_case_report_free(hpax_case_report* rep);
HPAX_API hpax_status hpax_case_id(const hpax_case_report* rep, int* out);
HPAX_API hpax_status hpax_case_n_points(const hpax_case_report* rep, int* out);
HPAX_API hpax_status hpax_case_point(const hpax_case_report* rep, int i,
                                     hpax_state* point, int* cls);
HPAX_API hpax_status hpax_case_root_count(const hpax_case_report* rep, int* out);
HPAX_API hpax_status hpax_case_unbounded(const hpax_case_report* rep, int* out);
HPAX_API hpax_status hpax_case_overall(const hpax_case_report* rep, int* has,
                                       int* cls);
HPAX_API hpax_status hpax_case_blow_up_time(const hpax_case_report* rep,
                                            int* has, double* t);
HPAX_API hpax_status hpax_blow_up_estimate(const hpax_params* p, double r0,
                                           double* out);

/* ---- stability ---- */
HPAX_API hpax_status hpax_char_cubic_at(const hpax_params* p,
                                        const hpax_equilibrium* eq,
                                        hpax_char_cubic* out);
HPAX_API hpax_status hpax_char_cubic_from_k(double p3, double p6, double K2,
                                            double K3, hpax_char_cubic* out);
HPAX_API hpax_status hpax_routh_hurwitz(const hpax_char_cubic* c,
                                        hpax_stability_verdict* out);
HPAX_API hpax_status hpax_rh_chains(const hpax_params* p,
                                    const hpax_equilibrium* eq,
                                    hpax_chain_report* out);

/* ---- lyapunov ---- */
HPAX_API hpax_status hpax_lyapunov_value(const hpax_equilibrium* eq,
                                         const hpax_state* y, double* out);
HPAX_API hpax_status hpax_lyapunov_constants(const hpax_params* p,
                                             const hpax_equilibrium* eq,
                                             hpax_lyapunov_report* out);
HPAX_API hpax_status hpax_lyapunov_F(const hpax_params* p, double amp,
                                     double* out);
HPAX_API hpax_status hpax_verify_decay(const hpax_params* p,
                                       const hpax_equilibrium* eq,
                                       const hpax_state* initial, double t_end,
                                       double dt, hpax_decay_report* out);

/* ---- delay ---- */
HPAX_API hpax_status hpax_qc_build(const hpax_params* p,
                                   const hpax_equilibrium* eq, int variant,
                                   hpax_qc** out);
HPAX_API hpax_status hpax_qc_inject(double p3, double p6, double K2, double K3,
                                    int variant, hpax_qc** out);
HPAX_API void hpax_qc_free(hpax_qc* qc);
HPAX_API hpax_status hpax_qc_coeffs(const hpax_qc* qc, double P_out[4],
                                    double Q_out[2], double b_out[3],
                                    double* delta0);
HPAX_API hpax_status hpax_qc_eval(const hpax_qc* qc, double lam_re,
                                  double lam_im, double tau, double* out_re,
                                  double* out_im);
HPAX_API hpax_status hpax_f_function(const hpax_qc* qc, double y, double* out);
HPAX_API hpax_status hpax_theorem_checks(const hpax_qc* qc, int flags[6]);

HPAX_API hpax_status hpax_switch_schedule(const hpax_qc* qc, int n_max,
                                          hpax_schedule** out);
HPAX_API void hpax_schedule_free(hpax_schedule* s);
HPAX_API hpax_status hpax_schedule_n_roots(const hpax_schedule* s, int* out);
HPAX_API hpax_status hpax_schedule_root(const hpax_schedule* s, int i,
                                        hpax_crossing* out);
HPAX_API hpax_status hpax_schedule_tau(const hpax_schedule* s, int i, int n,
                                       double* out);
HPAX_API hpax_status hpax_schedule_verdict(const hpax_schedule* s, int* out);
HPAX_API hpax_status hpax_schedule_first_switch(const hpax_schedule* s, int* has,
                                                double* tau);
HPAX_API hpax_status hpax_schedule_tau_critical(const hpax_schedule* s, int* has,
                                                double* tau);
HPAX_API hpax_status hpax_schedule_flags(const hpax_schedule* s,
                                         int* has_multiple_root,
                                         int* proviso_violation);
HPAX_API hpax_status hpax_schedule_b(const hpax_schedule* s, double b_out[3],
                                     double* delta0);
HPAX_API hpax_status hpax_schedule_tau0_roots(const hpax_schedule* s,
                                              double re_out[3],
                                              double im_out[3]);

HPAX_API hpax_status hpax_locate_roots(const hpax_qc* qc, double tau,
                                       const double region[4], int grid,
                                       double* out_re, double* out_im, int cap,
                                       int* n_found);
HPAX_API hpax_status hpax_contour_field(const hpax_qc* qc, double tau,
                                        const double region[4], int nx, int ny,
                                        double* out_re, double* out_im);

/* ---- integrate ---- */
HPAX_API hpax_status hpax_integrate_ode(const hpax_params* p,
                                        const hpax_state* y0, double t_end,
                                        double dt, hpax_trajectory** out);
HPAX_API hpax_status hpax_integrate_dde(const hpax_params* p,
                                        const hpax_history* h, double t_end,
                                        int steps_per_delay,
                                        hpax_trajectory** out);
HPAX_API void hpax_trajectory_free(hpax_trajectory* tr);
HPAX_API hpax_status hpax_trajectory_size(const hpax_trajectory* tr, int* out);
HPAX_API hpax_status hpax_trajectory_node(const hpax_trajectory* tr, int i,
                                          double* t, hpax_state* y,
                                          hpax_state* dy);
HPAX_API hpax_status hpax_trajectory_at(const hpax_trajectory* tr, double t,
                                        hpax_state* out);
HPAX_API hpax_status hpax_trajectory_flags(const hpax_trajectory* tr,
                                           int* has_nonneg, double* nonneg_t,
                                           int* has_bounds, double* bounds_t,
                                           int* has_blow_up, double* blow_up_t,
                                           int* fitting_ok);

HPAX_API hpax_status hpax_picard_run(const hpax_params* p, const hpax_history* h,
                                 int windows, int max_sweeps,
                                 int grid_per_window, hpax_picard** out);
HPAX_API void hpax_picard_free(hpax_picard* pc);
HPAX_API hpax_status hpax_picard_n_windows(const hpax_picard* pc, int* out);
/* envelope layout: {a_lo, a_hi, r_lo, r_hi, o_lo, o_hi} */
HPAX_API hpax_status hpax_picard_envelope(const hpax_picard* pc, int i,
                                          double env[6], int* sweeps,
                                          int* bracket_ok);
/* Borrowed view of the oracle trajectory; owned by the picard handle. */
HPAX_API hpax_status hpax_picard_trajectory(const hpax_picard* pc,
                                            const hpax_trajectory** out);

HPAX_API hpax_status hpax_explicit_solution(const hpax_params* p,
                                            const hpax_state* y0, double t,
                                            hpax_state* out);

/* ---- periodic ---- */
HPAX_API hpax_status hpax_build_periodic_setup(const hpax_params* p,
                                               const double* r0,
                                               const int* history_kind,
                                               hpax_setup** out);
HPAX_API void hpax_setup_free(hpax_setup* s);
HPAX_API hpax_status hpax_setup_values(const hpax_setup* s, double* r0,
                                       double* o0, double* a_tau_0,
                                       int* fallback_used,
                                       double* fitting_residual);
/* Borrowed view of the constructed history; owned by the setup handle. */
HPAX_API hpax_status hpax_setup_history(const hpax_setup* s,
                                        const hpax_history** out);
HPAX_API hpax_status hpax_verify_periodicity(const hpax_trajectory* tr,
                                             double period, double t_start,
                                             int samples, hpax_periodicity* out);
HPAX_API hpax_status hpax_estimate_period(const hpax_trajectory* tr,
                                          double t_start, int* has,
                                          double* period, double* peak);

#ifdef __cplusplus
}
#endif

#endif /* HPAX_H */
