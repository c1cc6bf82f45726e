#pragma once
#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "hpax/equilibria.hpp"
#include "hpax/model.hpp"

namespace hpax {

// Which side(s) of the transcendental function carry the delayed coupling
// strength K3: the primary object keeps the K3 (lambda + p6) block in both
// the polynomial part and the delayed part; the companion form keeps it in
// the delayed part only.
enum class QcVariant { k3_in_both, k3_delayed_only };

// C(lambda; tau) = P(lambda) + Q(lambda) e^{-lambda tau}.
struct QuasiChar {
  double p3 = 0, p6 = 0, K2 = 0, K3 = 0;
  QcVariant variant = QcVariant::k3_in_both;
  std::array<double, 4> P{}; // ascending coefficients, cubic monic
  std::array<double, 2> Q{}; // {K3 p6, K3}
  std::array<double, 3> b{}; // F(x) = x^3 + b[0] x^2 + b[1] x + b[2]
  double delta0 = 0;         // b[0]^2 - 3 b[1]: F' has two real zeros iff > 0

  std::complex<double> eval(std::complex<double> lam, double tau) const;
  std::complex<double> eval_deriv(std::complex<double> lam, double tau) const;
};

// Builders check the transversality guard |P(0) + Q(0)| > 1e-12 and throw
// guard_violation when the origin is a root for every tau.
QuasiChar make_quasi_char(const Params& p, const Equilibrium& eq,
                          QcVariant variant = QcVariant::k3_in_both);
QuasiChar make_quasi_char_injected(double p3, double p6, double K2, double K3,
                                   QcVariant variant = QcVariant::k3_in_both);

// F(y^2) = |P(iy)|^2 - |Q(iy)|^2, evaluated directly from the complex parts.
double f_function(const QuasiChar& qc, double y);

// Structural hypotheses behind the crossing analysis, evaluated honestly.
struct TheoremChecks {
  bool no_common_imag_zero = false;
  bool real_symmetry = false;
  bool nonzero_at_origin = false;
  bool finite_rhp_roots = false;
  bool finitely_many_crossings = false;
  bool all_ok = false;
};
TheoremChecks theorem_checks(const QuasiChar& qc);

enum class CrossDir { left_to_right, right_to_left };

struct CrossingRoot {
  double x = 0, v = 0;          // simple positive root of F; v = sqrt(x)
  double sin_vtau = 0, cos_vtau = 0;
  double theta = 0;             // atan2 angle wrapped to [0, 2 pi)
  double fprime = 0;            // F'(x): sign gives the crossing direction
  CrossDir direction = CrossDir::left_to_right;
  bool proviso_ok = true;       // printed magnitude test on the sin/cos data
  std::vector<double> taus;     // tau^n = (theta + 2 pi n)/v, n = 0..n_max-1
  double max_residual = 0;      // max |C(iv; tau^n)| over the emitted taus
};

enum class DelayVerdict {
  stable_all_tau,
  switches,
  unstable_all_tau_beyond_tc,
};

struct SwitchSchedule {
  std::array<double, 3> b{};
  double delta0 = 0;
  std::vector<CrossingRoot> roots; // ascending in x, proviso violators kept but skipped
  bool has_multiple_root = false;
  bool proviso_violation = false;
  std::array<std::complex<double>, 3> tau0_roots{}; // of P + Q
  DelayVerdict verdict = DelayVerdict::stable_all_tau;
  std::optional<double> first_switch_tau;
  // Smallest left-to-right crossing after which the open-right-half-plane
  // root count stays positive through the enumerated horizon.
  std::optional<double> tau_critical;
};

SwitchSchedule switch_schedule(const QuasiChar& qc, int n_max = 3);

// Damped-Newton root localization over [re0, re1] x [im0, im1] from a
// grid x grid lattice of starts; accepted roots have |C| < 1e-10, are
// deduplicated to 1e-6, and must land inside the region.
std::vector<std::complex<double>> locate_characteristic_roots(
    const QuasiChar& qc, double tau, std::array<double, 4> region,
    int grid = 20);

// Dense evaluation of C over the region for contour plotting (row-major,
// real axis fastest).
struct ContourField {
  std::array<double, 4> region{};
  int nx = 0, ny = 0;
  std::vector<double> re, im;
};
ContourField contour_field(const QuasiChar& qc, double tau,
                           std::array<double, 4> region, int nx, int ny);

}  // namespace hpax
