#include "movsing/roots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace movsing {

Complex evaluate_polynomial(std::span<const Complex> coeffs, Complex x) {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

GaussRational evaluate_polynomial(std::span<const GaussRational> coeffs, const GaussRational& x) {
    GaussRational acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

bool complex_order_less(Complex a, Complex b) {
    constexpr double eps = 1e-9;
    if (std::abs(a.real() - b.real()) > eps) return a.real() < b.real();
    if (std::abs(a.imag() - b.imag()) > eps) return a.imag() < b.imag();
    return false;
}

namespace {

Complex evaluate_derivative(std::span<const Complex> coeffs, Complex x) {
    Complex acc(0.0, 0.0);
    for (size_t i = coeffs.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * coeffs[i];
    return acc;
}

}  // namespace

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs, double tol) {
    size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == Complex(0.0, 0.0)) --deg;
    if (deg == 0) throw std::invalid_argument("polynomial_roots: zero polynomial");
    --deg;
    if (deg == 0) return {};

    std::vector<Complex> monic(deg + 1);
    for (size_t i = 0; i <= deg; ++i) monic[i] = coeffs[i] / coeffs[deg];

    // Cauchy bound sets the initial circle.
    double bound = 0.0;
    for (size_t i = 0; i < deg; ++i) bound = std::max(bound, std::abs(monic[i]));
    const double radius = std::max(0.5, std::min(1.0 + bound, 1e6));

    std::vector<Complex> z(deg);
    const Complex seed(0.4, 0.9);
    Complex w(1.0, 0.0);
    for (size_t i = 0; i < deg; ++i) {
        z[i] = radius * w;
        w *= seed;
    }

    const std::span<const Complex> mono(monic);
    for (int iter = 0; iter < 2000; ++iter) {
        double change = 0.0;
        for (size_t i = 0; i < deg; ++i) {
            Complex denom(1.0, 0.0);
            for (size_t j = 0; j < deg; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            if (denom == Complex(0.0, 0.0)) denom = Complex(1e-14, 0.0);
            const Complex step = evaluate_polynomial(mono, z[i]) / denom;
            z[i] -= step;
            change = std::max(change, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        if (change < tol * 1e-2) break;
    }

    // Newton polish on the original polynomial (skipped near multiple roots).
    for (auto& root : z) {
        for (int k = 0; k < 8; ++k) {
            const Complex d = evaluate_derivative(mono, root);
            if (std::abs(d) < 1e-14) break;
            const Complex step = evaluate_polynomial(mono, root) / d;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            root -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(root))) break;
        }
        // Flush tiny components so real/imaginary roots print cleanly.
        const double scale = std::max(1.0, std::abs(root));
        if (std::abs(root.imag()) < 1e-13 * scale) root.imag(0.0);
        if (std::abs(root.real()) < 1e-13 * scale) root.real(0.0);
    }
    std::sort(z.begin(), z.end(), complex_order_less);
    return z;
}

}  // namespace movsing
