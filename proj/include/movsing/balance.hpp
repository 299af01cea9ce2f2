#pragma once

// Dominant-balance search for movable singularities y ~ a * tau^p, p = m/n,
// and the Fuchs indices (resonances) of each family.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "movsing/ode_model.hpp"
#include "movsing/scalar.hpp"

namespace movsing {

class DegenerateFamilyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// p (p-1) ... (p-k+1); equals 1 for k = 0.
Rational falling_factorial(const Rational& p, int k);

/// Leading tau-exponent sum_k d_k (p - k) of a monomial under y ~ a tau^p.
Rational monomial_exponent(const DiffMonomial& m, const Rational& p);

/// Sparse polynomial in the leading coefficient a: power -> coefficient.
using LeadingEquation = std::map<int, GaussRational>;

struct Resonance {
    Complex value;
    std::optional<Rational> exact;  // set when the root is verified rational

    friend bool operator==(const Resonance& a, const Resonance& b) {
        return a.value == b.value && a.exact == b.exact;
    }
};

struct BalanceFamily {
    Rational p;
    int branch_order = 1;
    Rational q;                       // lowest tau-exponent of E (cleared form)
    Rational q_uncleared;             // same bookkeeping before clearing y^k
    LeadingEquation leading_equation;
    std::vector<Complex> leading_coeffs;               // nonzero roots
    std::vector<std::optional<GaussRational>> exact_leading;
    std::vector<size_t> dominant_monomials;
    bool consistent = false;
    bool singleton_dominant = false;
    std::vector<Resonance> resonances;  // for leading_coeffs.front()
    std::string note;

    bool is_pole() const { return branch_order == 1 && p < 0; }
    /// p * n, the starting index of the family's series in tau^(1/n).
    int start_index() const;
    /// q * n as an integer index.
    int residual_start_index() const;
};

struct BalanceOptions {
    int max_branch_order = 4;   // n_max
    int numerator_window = 6;   // m in [-window, window]
    double root_tol = 1e-12;
};

/// Enumerates p = m/n and returns every family with at least two dominant
/// monomials plus every negative-integer p (reported even when a single
/// monomial dominates, with consistent = false). Sorted by p ascending.
std::vector<BalanceFamily> find_balances(const DifferentialPolynomial& poly,
                                         const BalanceOptions& options = {});

/// Leading-coefficient polynomial for a given exponent and dominant set.
LeadingEquation leading_equation(const DifferentialPolynomial& poly, const Rational& p,
                                 const std::vector<size_t>& dominant);

Complex evaluate(const LeadingEquation& eq, Complex a);
GaussRational evaluate(const LeadingEquation& eq, const GaussRational& a);
std::string to_string(const LeadingEquation& eq);

/// Coefficients (ascending powers of r) of the resonance polynomial obtained
/// by linearizing the dominant monomials around y = a tau^p.
template <class S>
std::vector<S> resonance_polynomial(const DifferentialPolynomial& poly, const BalanceFamily& fam,
                                    const S& a);

/// Roots of the resonance polynomial; rational roots are verified exactly
/// when `a` is a verified exact root. Throws DegenerateFamilyError when the
/// polynomial vanishes identically.
std::vector<Resonance> compute_resonances(const DifferentialPolynomial& poly,
                                          const BalanceFamily& fam, Complex a);

/// Exact leading coefficient for `a` if the family recorded one.
std::optional<GaussRational> exact_leading_for(const BalanceFamily& fam, Complex a);

}  // namespace movsing
