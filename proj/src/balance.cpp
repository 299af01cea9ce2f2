#include "movsing/balance.hpp"

#include <algorithm>
#include <set>

#include "movsing/roots.hpp"

namespace movsing {

namespace {

template <class S>
S int_pow(const S& base, int e) {
    S acc(1);
    for (int i = 0; i < e; ++i) acc = acc * base;
    return acc;
}

Rational rat_pow(const Rational& base, int e) {
    Rational acc(1);
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

// Coefficients of prod_{i<k} (r + p - i) in ascending powers of r.
std::vector<Rational> shifted_falling_factorial(const Rational& p, int k) {
    std::vector<Rational> poly{Rational(1)};
    for (int i = 0; i < k; ++i) {
        const Rational c = p - i;
        std::vector<Rational> next(poly.size() + 1, Rational(0));
        for (size_t j = 0; j < poly.size(); ++j) {
            next[j] += poly[j] * c;
            next[j + 1] += poly[j];
        }
        poly = std::move(next);
    }
    return poly;
}

bool is_negative_integer(const Rational& p) {
    return p < 0 && boost::multiprecision::denominator(p) == 1;
}

}  // namespace

Rational falling_factorial(const Rational& p, int k) {
    Rational acc(1);
    for (int i = 0; i < k; ++i) acc *= (p - i);
    return acc;
}

Rational monomial_exponent(const DiffMonomial& m, const Rational& p) {
    Rational e(0);
    for (const auto& [k, d] : m.degrees) e += Rational(d) * (p - k);
    return e;
}

int BalanceFamily::start_index() const {
    return (p * branch_order).convert_to<int>();
}

int BalanceFamily::residual_start_index() const {
    return (q * branch_order).convert_to<int>();
}

LeadingEquation leading_equation(const DifferentialPolynomial& poly, const Rational& p,
                                 const std::vector<size_t>& dominant) {
    LeadingEquation eq;
    for (size_t j : dominant) {
        const auto& m = poly.monomials().at(j);
        Rational factor(1);
        for (const auto& [k, d] : m.degrees) factor *= rat_pow(falling_factorial(p, k), d);
        if (factor == 0) continue;
        auto& slot = eq[m.total_degree()];
        slot += m.coeff * GaussRational(factor);
    }
    for (auto it = eq.begin(); it != eq.end();) {
        if (it->second.is_zero()) {
            it = eq.erase(it);
        } else {
            ++it;
        }
    }
    return eq;
}

Complex evaluate(const LeadingEquation& eq, Complex a) {
    Complex acc(0.0, 0.0);
    for (const auto& [power, c] : eq) acc += c.to_complex() * int_pow(a, power);
    return acc;
}

GaussRational evaluate(const LeadingEquation& eq, const GaussRational& a) {
    GaussRational acc(0);
    for (const auto& [power, c] : eq) acc += c * pow(a, power);
    return acc;
}

std::string to_string(const LeadingEquation& eq) {
    if (eq.empty()) return "0 = 0";
    std::string out;
    for (auto it = eq.rbegin(); it != eq.rend(); ++it) {
        const auto& [power, c] = *it;
        std::string coeff = c.is_real() ? c.str() : "(" + c.str() + ")";
        std::string term;
        if (power == 0) {
            term = coeff;
        } else {
            const std::string mono = power == 1 ? "a" : "a^" + std::to_string(power);
            term = coeff == "1" ? mono : (coeff == "-1" ? "-" + mono : coeff + "*" + mono);
        }
        if (!out.empty()) {
            if (term[0] == '-') {
                out += " - " + term.substr(1);
            } else {
                out += " + " + term;
            }
        } else {
            out = term;
        }
    }
    return out + " = 0";
}

template <class S>
std::vector<S> resonance_polynomial(const DifferentialPolynomial& poly, const BalanceFamily& fam,
                                    const S& a) {
    std::vector<S> out;
    auto accumulate = [&out](size_t i, const S& v) {
        if (out.size() <= i) out.resize(i + 1, S(0));
        out[i] = out[i] + v;
    };
    for (size_t j : fam.dominant_monomials) {
        const auto& m = poly.monomials().at(j);
        const S weight = scalar_from<S>(m.coeff) * int_pow(a, m.total_degree());
        for (const auto& [k, d] : m.degrees) {
            // d/d(eps) of (y^(k))^d with all other factors at leading order.
            Rational others(1);
            for (const auto& [k2, d2] : m.degrees)
                if (k2 != k) others *= rat_pow(falling_factorial(fam.p, k2), d2);
            const Rational scale = Rational(d) * rat_pow(falling_factorial(fam.p, k), d - 1) * others;
            if (scale == 0) continue;
            const auto shifted = shifted_falling_factorial(fam.p, k);
            for (size_t i = 0; i < shifted.size(); ++i)
                accumulate(i, weight * scalar_from<S>(GaussRational(scale * shifted[i])));
        }
    }
    while (!out.empty() && is_exact_zero(out.back())) out.pop_back();
    return out;
}

template std::vector<Complex> resonance_polynomial<Complex>(const DifferentialPolynomial&,
                                                            const BalanceFamily&, const Complex&);
template std::vector<GaussRational> resonance_polynomial<GaussRational>(
    const DifferentialPolynomial&, const BalanceFamily&, const GaussRational&);

std::optional<GaussRational> exact_leading_for(const BalanceFamily& fam, Complex a) {
    for (size_t i = 0; i < fam.leading_coeffs.size() && i < fam.exact_leading.size(); ++i) {
        if (std::abs(fam.leading_coeffs[i] - a) <= 1e-9 * std::max(1.0, std::abs(a)) &&
            fam.exact_leading[i])
            return fam.exact_leading[i];
    }
    auto guess = rationalize(a);
    if (guess && !guess->is_zero() && !fam.leading_equation.empty() &&
        evaluate(fam.leading_equation, *guess).is_zero())
        return guess;
    return std::nullopt;
}

std::vector<Resonance> compute_resonances(const DifferentialPolynomial& poly,
                                          const BalanceFamily& fam, Complex a) {
    if (a == Complex(0.0, 0.0)) throw std::invalid_argument("resonances need a nonzero leading coefficient");
    const auto exact_a = exact_leading_for(fam, a);
    std::vector<Complex> coeffs;
    std::optional<std::vector<GaussRational>> exact_coeffs;
    if (exact_a) {
        exact_coeffs = resonance_polynomial<GaussRational>(poly, fam, *exact_a);
        for (const auto& c : *exact_coeffs) coeffs.push_back(c.to_complex());
    } else {
        coeffs = resonance_polynomial<Complex>(poly, fam, a);
        // Float cancellation can leave a tiny leading coefficient.
        double scale = 0.0;
        for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
        while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-13 * scale) coeffs.pop_back();
    }
    if (coeffs.empty()) throw DegenerateFamilyError("degenerate family: resonance polynomial vanishes");

    std::vector<Resonance> out;
    for (const Complex& r : polynomial_roots(coeffs)) {
        Resonance res{r, std::nullopt};
        if (exact_coeffs && std::abs(r.imag()) < 1e-7) {
            if (auto q = rationalize(r.real(), 10000, 1e-7)) {
                if (evaluate_polynomial(std::span<const GaussRational>(*exact_coeffs), GaussRational(*q))
                        .is_zero()) {
                    res.exact = *q;
                    res.value = Complex(to_double(*q), 0.0);
                }
            }
        }
        out.push_back(res);
    }
    std::sort(out.begin(), out.end(),
              [](const Resonance& x, const Resonance& y) { return complex_order_less(x.value, y.value); });
    return out;
}

std::vector<BalanceFamily> find_balances(const DifferentialPolynomial& poly,
                                         const BalanceOptions& options) {
    if (options.max_branch_order < 1) throw std::invalid_argument("max branch order must be >= 1");
    std::set<Rational> seen;
    std::vector<BalanceFamily> out;
    const auto& monos = poly.monomials();
    for (int n = 1; n <= options.max_branch_order; ++n) {
        for (int m = -options.numerator_window; m <= options.numerator_window; ++m) {
            const Rational p(m, n);
            if (p == 0 || !seen.insert(p).second) continue;

            std::vector<Rational> exps;
            exps.reserve(monos.size());
            for (const auto& mono : monos) exps.push_back(monomial_exponent(mono, p));
            const Rational q = *std::min_element(exps.begin(), exps.end());
            std::vector<size_t> dominant;
            for (size_t j = 0; j < exps.size(); ++j)
                if (exps[j] == q) dominant.push_back(j);
            const bool forced = is_negative_integer(p);
            if (dominant.size() < 2 && !forced) continue;

            BalanceFamily fam;
            fam.p = p;
            fam.branch_order = boost::multiprecision::denominator(p).convert_to<int>();
            fam.q = q;
            fam.q_uncleared = q - Rational(poly.clearing_multiplier()) * p;
            fam.dominant_monomials = dominant;
            fam.singleton_dominant = dominant.size() == 1;
            fam.leading_equation = leading_equation(poly, p, dominant);

            if (fam.leading_equation.empty()) {
                fam.note = "leading terms vanish identically at this exponent";
            } else {
                const int low = fam.leading_equation.begin()->first;
                const int high = fam.leading_equation.rbegin()->first;
                std::vector<Complex> coeffs(static_cast<size_t>(high - low + 1), Complex(0.0, 0.0));
                for (const auto& [power, c] : fam.leading_equation)
                    coeffs[static_cast<size_t>(power - low)] = c.to_complex();
                if (high > low) fam.leading_coeffs = polynomial_roots(coeffs, options.root_tol);
                for (const Complex& a : fam.leading_coeffs) {
                    auto ex = rationalize(a);
                    if (ex && !ex->is_zero() && evaluate(fam.leading_equation, *ex).is_zero()) {
                        fam.exact_leading.push_back(ex);
                    } else {
                        fam.exact_leading.push_back(std::nullopt);
                    }
                }
                if (fam.leading_coeffs.empty())
                    fam.note = "leading equation " + to_string(fam.leading_equation) +
                               " has only the zero root";
            }
            fam.consistent = !fam.leading_coeffs.empty();
            if (fam.consistent) {
                try {
                    fam.resonances = compute_resonances(poly, fam, fam.leading_coeffs.front());
                } catch (const DegenerateFamilyError& e) {
                    fam.note = e.what();
                }
            }
            out.push_back(std::move(fam));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const BalanceFamily& a, const BalanceFamily& b) { return a.p < b.p; });
    return out;
}

}  // namespace movsing
