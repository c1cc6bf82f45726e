#pragma once
#include <complex>
#include <vector>

namespace hpax {

// Roots of c0 + c1 x + ... + cn x^n (cn != 0) via the companion matrix.
// Coefficients in ascending order; leading zeros are trimmed.
std::vector<std::complex<double>> poly_roots(const std::vector<double>& coeffs);

// Real roots filtered with |Im| <= tol_scale * (1 + |root|).
std::vector<double> real_roots(const std::vector<double>& coeffs,
                               double tol_scale = 1e-9);

double poly_eval(const std::vector<double>& coeffs, double x);
std::complex<double> poly_eval(const std::vector<double>& coeffs,
                               std::complex<double> x);

}  // namespace hpax
