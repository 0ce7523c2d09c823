#include "thirdq/hermite.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thirdq::fock {

namespace {

constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^(-1/4)

void check_order(int n, int max_order) {
    if (n < 0) {
        throw std::invalid_argument("eigenfunction order negative");
    }
    if (n > max_order) {
        throw std::invalid_argument("eigenfunction order overflow");
    }
}

}  // namespace

double oscillator_eigenfunction(int n, double x, int max_order) {
    check_order(n, max_order);
    if (!std::isfinite(x)) {
        throw std::invalid_argument("eigenfunction argument not finite");
    }
    double prev = 0.0;
    double cur = kPiQuarterInv * std::exp(-0.5 * x * x);
    for (int k = 1; k <= n; ++k) {
        const double next = x * std::sqrt(2.0 / k) * cur - std::sqrt((k - 1.0) / k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> oscillator_eigenfunctions(int n_max, double x, int max_order) {
    check_order(n_max, max_order);
    if (!std::isfinite(x)) {
        throw std::invalid_argument("eigenfunction argument not finite");
    }
    std::vector<double> values(static_cast<std::size_t>(n_max) + 1);
    values[0] = kPiQuarterInv * std::exp(-0.5 * x * x);
    if (n_max >= 1) {
        values[1] = x * std::sqrt(2.0) * values[0];
    }
    for (int k = 2; k <= n_max; ++k) {
        values[k] = x * std::sqrt(2.0 / k) * values[k - 1] - std::sqrt((k - 1.0) / k) * values[k - 2];
    }
    return values;
}

namespace {

// Orthonormal Hermite polynomial p_n (weight exp(-x^2)) and its
// derivative at x; p_n(x) = phi_n(x) exp(x^2/2).
struct PolyEval {
    double value;
    double derivative;
};

PolyEval orthonormal_hermite(int n, double x) {
    double prev = 0.0;
    double cur = kPiQuarterInv;
    for (int k = 1; k <= n; ++k) {
        const double next = x * std::sqrt(2.0 / k) * cur - std::sqrt((k - 1.0) / k) * prev;
        prev = cur;
        cur = next;
    }
    return {cur, std::sqrt(2.0 * n) * prev};
}

}  // namespace

QuadratureRule gauss_hermite(int n_nodes) {
    if (n_nodes < 1) {
        throw std::invalid_argument("quadrature needs at least one node");
    }
    if (n_nodes > 512) {
        throw std::invalid_argument("quadrature order overflow");
    }
    const int n = n_nodes;
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    // Roots found by Newton iteration from the classic descending initial
    // guesses; only the upper half is computed, the rest follows from
    // symmetry about zero.
    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        PolyEval p{0.0, 0.0};
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            p = orthonormal_hermite(n, z);
            const double step = p.value / p.derivative;
            z -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw std::runtime_error("quadrature node iteration failed");
        }
        p = orthonormal_hermite(n, z);
        rule.nodes[i] = z;
        rule.weights[i] = 2.0 / (p.derivative * p.derivative);
        rule.nodes[n - 1 - i] = -z;
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n % 2 == 1) {
        rule.nodes[half - 1] = 0.0;
    }
    // Ascending node order.
    for (int i = 0; i < n / 2; ++i) {
        std::swap(rule.nodes[i], rule.nodes[n - 1 - i]);
        std::swap(rule.weights[i], rule.weights[n - 1 - i]);
    }
    return rule;
}

double eigenfunction_overlap(int n, int m, const QuadratureRule& rule) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double x = rule.nodes[k];
        const double pn = orthonormal_hermite(n, x).value;
        const double pm = orthonormal_hermite(m, x).value;
        sum += rule.weights[k] * pn * pm;
    }
    return sum;
}

}  // namespace thirdq::fock
