#include "hpax/stability.hpp"

#include <cmath>

#include "hpax/error.hpp"
#include "hpax/poly.hpp"

namespace hpax {

namespace {
constexpr double kBand = 1e-10;
}

CharCubic char_cubic_from_k(double p3, double p6, double K2, double K3) {
  CharCubic c;
  const double m = p6 - K2;
  c.alpha1 = p3 + m + 1.0;
  c.alpha2 = p3 + m + p3 * m + K3;
  c.alpha3 = p3 * m + p6 * K3;
  c.delta = 18.0 * c.alpha1 * c.alpha2 * c.alpha3 -
            4.0 * std::pow(c.alpha1, 3) * c.alpha3 +
            c.alpha1 * c.alpha1 * c.alpha2 * c.alpha2 -
            4.0 * std::pow(c.alpha2, 3) - 27.0 * c.alpha3 * c.alpha3;
  const auto rts = poly_roots({c.alpha3, c.alpha2, c.alpha1, 1.0});
  for (size_t i = 0; i < 3 && i < rts.size(); ++i) c.roots[i] = rts[i];
  return c;
}

CharCubic char_cubic(const Params& p, const Equilibrium& eq) {
  return char_cubic_from_k(p.p3, p.p6, eq.K2, eq.K3);
}

StabilityVerdict routh_hurwitz(const CharCubic& c) {
  StabilityVerdict v;
  const double m1 = c.alpha1;
  const double m2 = c.alpha3;
  const double m3 = c.alpha1 * c.alpha2 - c.alpha3;
  v.rh.alpha1_pos = m1 > 0.0;
  v.rh.alpha3_pos = m2 > 0.0;
  v.rh.product = m3 > 0.0;
  v.max_real_part = c.roots[0].real();
  for (const auto& z : c.roots) v.max_real_part = std::max(v.max_real_part, z.real());
  if (m1 < -kBand || m2 < -kBand || m3 < -kBand)
    v.kind = StabilityKind::unstable;
  else if (m1 <= kBand || m2 <= kBand || m3 <= kBand)
    v.kind = StabilityKind::inconclusive_non_hyperbolic;
  else
    v.kind = StabilityKind::asymptotically_stable;
  return v;
}

ChainReport verify_rh_always_stable(const Params& p, const Equilibrium& eq) {
  if (!(p.p2 > 0.0))
    throw domain_error("stability chains need p2 > 0");
  ChainReport rep;
  const double x = eq.r;
  const double x1 = p.p5 / p.p6;
  const double x2 = (p.p5 + 1.0) / p.p6;

  // Chain 1 <=> alpha1 > 0 as a quadratic in x.
  rep.chain1 = 2.0 * p.p6 * p.p6 * x * x +
                   (p.p3 + 1.0 - p.p6 * (1.0 + 4.0 * p.p5)) * x +
                   2.0 * p.p5 * (p.p5 + 1.0) >
               0.0;

  // Chain 2 <=> alpha3 > 0 via the r*-parameterized K3.
  const double e1 = p.p6 * x - p.p5;
  const double e2 = 1.0 + p.p5 - p.p6 * x;
  const double sq = std::sqrt(p.p4 * e1);
  const double k3_over_p3 = p.p2 * sq / (std::sqrt(e2) + p.p2 * sq);
  rep.chain2 = (x / (2.0 * p.p6)) * (1.0 + k3_over_p3) > (x - x1) * (x2 - x);

  // Chain 3: either the K3-quadratic residual is nonpositive, or K2 stays
  // below the explicit cap.
  const double K3 = eq.K3;
  const double q = 1.0 + p.p3;
  const double R = (K3 / q) * (K3 / q) -
                   2.0 * (1.0 - 2.0 * p.p6 / q) * K3 +
                   (p.p3 - 1.0) * (p.p3 - 1.0);
  if (R <= 0.0)
    rep.chain3 = true;
  else
    rep.chain3 = eq.K2 < p.p6 + 0.5 * (p.p3 + 1.0 + K3 / q - std::sqrt(R));

  rep.all_hold = rep.chain1 && rep.chain2 && rep.chain3;
  const auto verdict = routh_hurwitz(char_cubic(p, eq));
  rep.agrees_with_verdict =
      rep.all_hold == (verdict.kind == StabilityKind::asymptotically_stable);
  return rep;
}

}  // namespace hpax
