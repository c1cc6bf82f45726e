#include "hpax/poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hpax/error.hpp"

namespace hpax {

std::vector<std::complex<double>> poly_roots(const std::vector<double>& coeffs) {
  std::vector<double> c = coeffs;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[i] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

std::vector<double> real_roots(const std::vector<double>& coeffs,
                               double tol_scale) {
  std::vector<double> out;
  for (const auto& z : poly_roots(coeffs))
    if (std::abs(z.imag()) <= tol_scale * (1.0 + std::abs(z)))
      out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

double poly_eval(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

std::complex<double> poly_eval(const std::vector<double>& coeffs,
                               std::complex<double> x) {
  std::complex<double> v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace hpax
