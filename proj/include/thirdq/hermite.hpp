#pragma once

#include <vector>

namespace thirdq::fock {

/// Highest eigenfunction order accepted by oscillator_eigenfunction.
inline constexpr int kMaxEigenfunctionOrder = 200;

/// Harmonic-oscillator energy eigenfunction phi_n(x) in dimensionless
/// units (hbar = m = omega = 1):
///
///   phi_n(x) = (2^n n! sqrt(pi))^(-1/2) H_n(x) exp(-x^2/2)
///
/// with H_n the physicists' Hermite polynomial. Evaluated by upward
/// recurrence on the normalized functions, so no factorials appear and
/// orders up to a few hundred stay stable.
double oscillator_eigenfunction(int n, double x, int max_order = kMaxEigenfunctionOrder);

/// phi_0(x) .. phi_n_max(x) in a single recurrence pass.
std::vector<double> oscillator_eigenfunctions(int n_max, double x, int max_order = kMaxEigenfunctionOrder);

/// Gauss-Hermite rule: integrates f against exp(-x^2) over the real line,
/// exactly for polynomial f of degree <= 2n-1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_hermite(int n_nodes);

/// Gram matrix entry <phi_n, phi_m> evaluated with the rule above.
/// The exp(-x^2/2) factors of the eigenfunctions combine with the
/// quadrature weight, so the integrand handed to the rule is polynomial.
double eigenfunction_overlap(int n, int m, const QuadratureRule& rule);

}  // namespace thirdq::fock
