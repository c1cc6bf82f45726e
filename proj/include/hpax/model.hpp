#pragma once
#include <optional>
#include <vector>

namespace hpax {

struct Params {
  double A = 0;
  double p2 = 0;
  double p3 = 0;
  double p4 = 0;
  double p5 = 0;
  double p6 = 0;
  double tau = 0;
};

struct State {
  double a = 0;
  double r = 0;
  double o = 0;
};

// Hill term s^2 / (p4 + s^2) with the 0/0 := 0 convention (p4 = 0, s = 0).
double hill(double p4, double s);

// Right-hand side of the three-field system; `a_delayed` stands in for the
// delayed axis value that drives the third channel.
State rhs(const Params& p, const State& y, double a_delayed);

// Invariant box the flow enters and never leaves (componentwise bounds).
// Undefined (nullopt) when a denominator vanishes (p3 = 0 or p6 = 0).
struct Box {
  double a_lo, a_hi;
  double r_lo, r_hi;
  double o_lo, o_hi;
  bool contains(const State& y, double tol) const;
};
std::optional<Box> invariant_box(const Params& p);

// Pre-history for the delayed channel on [-tau, 0]: the axis channel a(t)
// plus the initial point (r0, o0) at t = 0.
class History {
public:
  enum class Kind { constant, quadexp, hermite };

  History() = default; // constant zero profile
  static History constant(double a0, double r0, double o0);
  // a(t) = a0 + lambda * t^2 * exp(-t); a'(0) = 0 by construction.
  static History quadexp(double a0, double lambda, double r0, double o0);
  // Piecewise cubic Hermite through (t_i, v_i, d_i); knots strictly increasing.
  static History hermite(std::vector<double> t, std::vector<double> v,
                         std::vector<double> d, double r0, double o0);

  Kind kind() const { return kind_; }
  double r0() const { return r0_; }
  double o0() const { return o0_; }

  double value(double t) const;
  double deriv(double t) const;

  // Exact integral of a(u) * exp(u - c) over [u0, u1] (closed form per kind).
  double integral_exp(double u0, double u1, double c) const;

  // Parameter access for serialization.
  double a0() const { return a0_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& knot_t() const { return kt_; }
  const std::vector<double>& knot_v() const { return kv_; }
  const std::vector<double>& knot_d() const { return kd_; }

private:
  Kind kind_ = Kind::constant;
  double r0_ = 0, o0_ = 0;
  double a0_ = 0, lambda_ = 0;       // constant / quadexp
  std::vector<double> kt_, kv_, kd_; // hermite
};

// |a'(0) + p3 a(0) - A / (1 + p2 o0 r0)| <= tol : the history's terminal slope
// matches the axis equation at t = 0.
bool check_fitting_condition(const Params& p, const History& h, double tol = 1e-9);
double fitting_residual(const Params& p, const History& h);

// Throws invalid_argument_error on non-finite or negative-where-forbidden input.
void validate(const Params& p);
void validate(const State& y);

}  // namespace hpax
