#pragma once
#include <array>
#include <complex>

#include "hpax/equilibria.hpp"
#include "hpax/model.hpp"

namespace hpax {

// Characteristic cubic lambda^3 + alpha1 lambda^2 + alpha2 lambda + alpha3
// of the tau = 0 linearization.
struct CharCubic {
  double alpha1 = 0, alpha2 = 0, alpha3 = 0;
  double delta = 0; // cubic discriminant
  std::array<std::complex<double>, 3> roots{};
};

CharCubic char_cubic(const Params& p, const Equilibrium& eq);
CharCubic char_cubic_from_k(double p3, double p6, double K2, double K3);

enum class StabilityKind {
  asymptotically_stable,
  unstable,
  inconclusive_non_hyperbolic,
};

struct RHChecks {
  bool alpha1_pos = false;
  bool alpha3_pos = false;
  bool product = false; // alpha1 alpha2 > alpha3
};

struct StabilityVerdict {
  StabilityKind kind = StabilityKind::inconclusive_non_hyperbolic;
  RHChecks rh;
  double max_real_part = 0;
};

// Routh-Hurwitz on the cubic with a 1e-10 margin band: margins inside the
// band give the inconclusive verdict, a margin below -band gives unstable.
StabilityVerdict routh_hurwitz(const CharCubic& c);

// The three closed-form inequality chains behind the always-stable claim,
// evaluated at x = r*. Requires p2 > 0 (the chains assume an active axis
// coupling). `agrees` compares their conjunction against the direct verdict.
struct ChainReport {
  bool chain1 = false, chain2 = false, chain3 = false;
  bool all_hold = false;
  bool agrees_with_verdict = false;
};

ChainReport verify_rh_always_stable(const Params& p, const Equilibrium& eq);

}  // namespace hpax
