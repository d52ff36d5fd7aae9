#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ifock::detail {

// ∫dⁿk exp(−kᵀαk + βᵀk + γ) for complex symmetric α with Re α positive
// definite. Variables are eliminated one at a time from the last; each
// Schur complement keeps a positive definite real part, so the principal
// square root is the right branch at every step.
inline std::complex<double> gaussian_integral(Eigen::MatrixXcd alpha, Eigen::VectorXcd beta,
                                              std::complex<double> gamma) {
  using C = std::complex<double>;
  const double pi = 3.14159265358979323846;
  C log_prefactor = 0.0;
  for (Eigen::Index n = alpha.rows() - 1; n >= 0; --n) {
    const C ann = alpha(n, n);
    log_prefactor += 0.5 * std::log(C(pi) / ann);
    gamma += beta(n) * beta(n) / (4.0 * ann);
    for (Eigen::Index i = 0; i < n; ++i) {
      beta(i) -= beta(n) * alpha(i, n) / ann;
      for (Eigen::Index j = 0; j < n; ++j) alpha(i, j) -= alpha(i, n) * alpha(j, n) / ann;
    }
  }
  return std::exp(log_prefactor + gamma);
}

}  // namespace ifock::detail
