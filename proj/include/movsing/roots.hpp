#pragma once

#include <span>
#include <vector>

#include "movsing/scalar.hpp"

namespace movsing {

/// All complex roots of sum_i coeffs[i] * x^i (coeffs[back] != 0), computed
/// by Durand-Kerner iteration and polished with Newton steps. Returned in a
/// deterministic order: ascending real part, then imaginary part.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs, double tol = 1e-12);

/// Horner evaluation.
Complex evaluate_polynomial(std::span<const Complex> coeffs, Complex x);
GaussRational evaluate_polynomial(std::span<const GaussRational> coeffs, const GaussRational& x);

/// Sort key used for reproducible root ordering (values closer than 1e-9 tie).
bool complex_order_less(Complex a, Complex b);

}  // namespace movsing
