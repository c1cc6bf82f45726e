#include "hpax/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hpax/error.hpp"

namespace hpax {

double hill(double p4, double s) {
  const double s2 = s * s;
  const double den = p4 + s2;
  if (den == 0.0) return 0.0; // 0/0 convention
  return s2 / den;
}

State rhs(const Params& p, const State& y, double a_delayed) {
  const double s = y.o * y.r;
  State d;
  d.a = p.A / (1.0 + p.p2 * s) - p.p3 * y.a;
  d.r = hill(p.p4, s) + p.p5 - p.p6 * y.r;
  d.o = a_delayed - y.o;
  return d;
}

bool Box::contains(const State& y, double tol) const {
  return y.a >= a_lo - tol && y.a <= a_hi + tol && y.r >= r_lo - tol &&
         y.r <= r_hi + tol && y.o >= o_lo - tol && y.o <= o_hi + tol;
}

std::optional<Box> invariant_box(const Params& p) {
  if (p.p3 <= 0.0 || p.p6 <= 0.0) return std::nullopt;
  Box b;
  b.a_lo = p.A * p.p6 / (p.p3 * p.p6 + p.A * p.p2 * (p.p5 + 1.0));
  b.a_hi = p.A / p.p3;
  b.r_lo = p.p5 / p.p6;
  b.r_hi = (p.p5 + 1.0) / p.p6;
  b.o_lo = b.a_lo;
  b.o_hi = b.a_hi;
  return b;
}

History History::constant(double a0, double r0, double o0) {
  History h;
  h.kind_ = Kind::constant;
  h.a0_ = a0;
  h.r0_ = r0;
  h.o0_ = o0;
  return h;
}

History History::quadexp(double a0, double lambda, double r0, double o0) {
  History h;
  h.kind_ = Kind::quadexp;
  h.a0_ = a0;
  h.lambda_ = lambda;
  h.r0_ = r0;
  h.o0_ = o0;
  return h;
}

History History::hermite(std::vector<double> t, std::vector<double> v,
                         std::vector<double> d, double r0, double o0) {
  if (t.size() < 2 || t.size() != v.size() || t.size() != d.size())
    throw invalid_argument_error("hermite history needs >= 2 consistent knots");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw invalid_argument_error("hermite history knots must strictly increase");
  History h;
  h.kind_ = Kind::hermite;
  h.kt_ = std::move(t);
  h.kv_ = std::move(v);
  h.kd_ = std::move(d);
  h.r0_ = r0;
  h.o0_ = o0;
  return h;
}

namespace {

// Hermite cubic on [t0, t1] through (v0, d0), (v1, d1), evaluated at t.
void hermite_coeffs(double t0, double t1, double v0, double d0, double v1,
                    double d1, double c[4]) {
  const double h = t1 - t0;
  c[0] = v0;
  c[1] = d0;
  c[2] = (3.0 * (v1 - v0) / h - 2.0 * d0 - d1) / h;
  c[3] = (2.0 * (v0 - v1) / h + d0 + d1) / (h * h);
}

double poly3(const double c[4], double x) {
  return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

double poly3_deriv(const double c[4], double x) {
  return c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
}

// Exact integral of p(u) e^{u-c} du for cubic p given in shifted coords
// x = u - t0: antiderivative e^{u-c} (p - p' + p'' - p''') evaluated in x.
double cubic_int_exp(const double c[4], double t0, double u0, double u1,
                     double cshift) {
  auto anti = [&](double u) {
    const double x = u - t0;
    const double p = poly3(c, x);
    const double p1 = poly3_deriv(c, x);
    const double p2 = 2.0 * c[2] + 6.0 * c[3] * x;
    const double p3 = 6.0 * c[3];
    return std::exp(u - cshift) * (p - p1 + p2 - p3);
  };
  return anti(u1) - anti(u0);
}

} // namespace

double History::value(double t) const {
  switch (kind_) {
  case Kind::constant:
    return a0_;
  case Kind::quadexp:
    return a0_ + lambda_ * t * t * std::exp(-t);
  case Kind::hermite: {
    size_t i = 0;
    while (i + 2 < kt_.size() && t > kt_[i + 1]) ++i;
    double c[4];
    hermite_coeffs(kt_[i], kt_[i + 1], kv_[i], kd_[i], kv_[i + 1], kd_[i + 1], c);
    return poly3(c, t - kt_[i]);
  }
  }
  return 0.0;
}

double History::deriv(double t) const {
  switch (kind_) {
  case Kind::constant:
    return 0.0;
  case Kind::quadexp:
    return lambda_ * std::exp(-t) * (2.0 * t - t * t);
  case Kind::hermite: {
    size_t i = 0;
    while (i + 2 < kt_.size() && t > kt_[i + 1]) ++i;
    double c[4];
    hermite_coeffs(kt_[i], kt_[i + 1], kv_[i], kd_[i], kv_[i + 1], kd_[i + 1], c);
    return poly3_deriv(c, t - kt_[i]);
  }
  }
  return 0.0;
}

double History::integral_exp(double u0, double u1, double c) const {
  if (u0 == u1) return 0.0;
  switch (kind_) {
  case Kind::constant:
    return a0_ * (std::exp(u1 - c) - std::exp(u0 - c));
  case Kind::quadexp:
    // integrand (a0 + L u^2 e^{-u}) e^{u-c} = a0 e^{u-c} + L e^{-c} u^2
    return a0_ * (std::exp(u1 - c) - std::exp(u0 - c)) +
           lambda_ * std::exp(-c) * (u1 * u1 * u1 - u0 * u0 * u0) / 3.0;
  case Kind::hermite: {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < kt_.size(); ++i) {
      const double lo = std::max(u0, kt_[i]);
      const double hi = std::min(u1, i + 2 == kt_.size()
                                          ? std::numeric_limits<double>::infinity()
                                          : kt_[i + 1]);
      if (hi <= lo) continue;
      double cf[4];
      hermite_coeffs(kt_[i], kt_[i + 1], kv_[i], kd_[i], kv_[i + 1], kd_[i + 1], cf);
      acc += cubic_int_exp(cf, kt_[i], lo, hi, c);
    }
    // Tail left of the first knot extrapolates the first piece.
    if (u0 < kt_.front()) {
      double cf[4];
      hermite_coeffs(kt_[0], kt_[1], kv_[0], kd_[0], kv_[1], kd_[1], cf);
      acc += cubic_int_exp(cf, kt_[0], u0, std::min(u1, kt_.front()), c);
    }
    return acc;
  }
  }
  return 0.0;
}

double fitting_residual(const Params& p, const History& h) {
  const double slope = h.deriv(0.0);
  const double a0 = h.value(0.0);
  return std::abs(slope + p.p3 * a0 - p.A / (1.0 + p.p2 * h.o0() * h.r0()));
}

bool check_fitting_condition(const Params& p, const History& h, double tol) {
  return fitting_residual(p, h) <= tol;
}

void validate(const Params& p) {
  const double vals[] = {p.A, p.p2, p.p3, p.p4, p.p5, p.p6, p.tau};
  for (double v : vals)
    if (!std::isfinite(v))
      throw invalid_argument_error("non-finite parameter");
  if (p.A < 0 || p.p2 < 0 || p.p3 < 0 || p.p4 < 0 || p.p5 < 0 || p.p6 < 0 ||
      p.tau < 0)
    throw invalid_argument_error("negative parameter");
}

void validate(const State& y) {
  if (!std::isfinite(y.a) || !std::isfinite(y.r) || !std::isfinite(y.o))
    throw invalid_argument_error("non-finite state");
}

}  // namespace hpax
