#include "movsing/local_series.hpp"

#include <algorithm>
#include <cmath>

#include "movsing/roots.hpp"

namespace movsing {

template <class S>
PuiseuxSeries<S> substitute(const DifferentialPolynomial& poly, const PuiseuxSeries<S>& s,
                            std::optional<int> through) {
    const int n = s.branch_order();
    std::vector<PuiseuxSeries<S>> derivs;
    for (int k = 0; k <= std::max(poly.order(), 0); ++k) derivs.push_back(series_differentiate(s, k));
    std::map<std::pair<int, int>, PuiseuxSeries<S>> powers;
    auto power_of = [&](int k, int d) -> const PuiseuxSeries<S>& {
        auto it = powers.find({k, d});
        if (it == powers.end()) it = powers.emplace(std::make_pair(k, d), series_pow(derivs[k], d)).first;
        return it->second;
    };

    PuiseuxSeries<S> acc = PuiseuxSeries<S>::zero(n);
    for (const auto& m : poly.monomials()) {
        auto term = PuiseuxSeries<S>::monomial(scalar_from<S>(m.coeff), 0, n);
        for (const auto& [k, d] : m.degrees) term = term * power_of(k, d);
        acc = acc + term;
    }
    if (through && acc.truncation() && *acc.truncation() < *through) {
        const int required = *s.truncation() + (*through - *acc.truncation());
        throw TruncationError("series truncation insufficient: need K >= " + std::to_string(required),
                              required);
    }
    return acc;
}

template PuiseuxSeries<Complex> substitute(const DifferentialPolynomial&, const PuiseuxSeries<Complex>&,
                                           std::optional<int>);
template PuiseuxSeries<GaussRational> substitute(const DifferentialPolynomial&,
                                                 const PuiseuxSeries<GaussRational>&, std::optional<int>);

int residual_floor(const DifferentialPolynomial& poly, int start, int branch_order) {
    std::optional<int> lowest;
    for (const auto& m : poly.monomials()) {
        int e = 0;
        for (const auto& [k, d] : m.degrees) e += d * (start - k * branch_order);
        lowest = lowest ? std::min(*lowest, e) : e;
    }
    return lowest.value_or(0);
}

namespace {

template <class S>
bool negligible(const S& x, double scale) {
    if constexpr (is_exact_scalar<S>) {
        (void)scale;
        return x.is_zero();
    } else {
        return std::abs(x) <= 1e-9 * scale;
    }
}

double monomial_scale(const DifferentialPolynomial& poly, Complex a) {
    double scale = 1.0;
    for (const auto& m : poly.monomials())
        scale = std::max(scale, magnitude(m.coeff) * std::pow(std::abs(a), m.total_degree()));
    return scale;
}

template <class S>
struct SolveResult {
    PuiseuxSeries<S> series;
    PuiseuxSeries<S> residual;
    std::map<Rational, Complex> free_parameters;
    std::vector<CompatibilityCheck> compatibility;
};

template <class S>
SolveResult<S> solve_impl(const DifferentialPolynomial& poly, const BalanceFamily& fam, const S& a,
                          const std::map<Rational, S>& free_values, int K) {
    const int n = fam.branch_order;
    const int s0 = fam.start_index();
    const int qn = residual_floor(poly, s0, n);
    const auto R = resonance_polynomial<S>(poly, fam, a);
    if (R.empty()) throw DegenerateFamilyError("degenerate family: resonance polynomial vanishes");
    const double scale = monomial_scale(poly, to_complex(a));

    SolveResult<S> out;
    std::vector<S> c{a};
    for (int j = 1; j <= K; ++j) {
        std::vector<S> trial = c;
        trial.push_back(S(0));
        const auto y = PuiseuxSeries<S>::from_coefficients(s0, trial, n, s0 + j);
        const S rest = substitute(poly, y, qn + j).coeff(qn + j);
        const Rational r(j, n);
        const S rr = scalar_from<S>(GaussRational(r));
        const S Rr = evaluate_polynomial(std::span<const S>(R), rr);
        double rscale = 0.0;
        for (size_t i = 0; i < R.size(); ++i)
            rscale += magnitude(R[i]) * std::pow(std::abs(to_double(r)), static_cast<double>(i));
        if (negligible(Rr, rscale)) {
            auto it = free_values.find(r);
            const S value = it == free_values.end() ? S(0) : it->second;
            out.compatibility.push_back({j, r, negligible(rest, scale), magnitude(rest)});
            out.free_parameters[r] = to_complex(value);
            c.push_back(value);
        } else {
            c.push_back(-(rest * a) / Rr);
        }
    }
    out.series = PuiseuxSeries<S>::from_coefficients(s0, c, n, s0 + K);
    out.residual = substitute(poly, out.series, qn + K);
    return out;
}

template <class S>
void fill(LocalSolution& sol, SolveResult<S>&& r) {
    if constexpr (is_exact_scalar<S>) {
        sol.series = r.series.template cast<Complex>();
        sol.residual = r.residual.template cast<Complex>();
        sol.exact_series = std::move(r.series);
    } else {
        sol.series = std::move(r.series);
        sol.residual = std::move(r.residual);
    }
    sol.free_parameters = std::move(r.free_parameters);
    sol.compatibility = std::move(r.compatibility);
}

}  // namespace

LocalSolution solve_local_series(const DifferentialPolynomial& poly, const BalanceFamily& fam,
                                 Complex a, const LocalSolveOptions& options) {
    if (options.order < 0) throw std::invalid_argument("series order must be nonnegative");
    if (a == Complex(0.0, 0.0)) throw std::invalid_argument("leading coefficient must be nonzero");
    if (!fam.consistent && !options.force)
        throw std::invalid_argument("family p = " + to_string(fam.p) +
                                    " is inconsistent; pass force to expand it anyway");

    LocalSolution sol;
    sol.family = fam;
    sol.equation = poly;
    sol.leading = a;
    sol.order = options.order;
    sol.forced = !fam.consistent;

    std::optional<GaussRational> exact_a;
    if (options.mode != ScalarMode::Float) {
        exact_a = fam.consistent ? exact_leading_for(fam, a) : rationalize(a);
    }
    std::map<Rational, GaussRational> exact_free;
    bool free_exact = true;
    for (const auto& [r, v] : options.free_values) {
        auto g = rationalize(v);
        if (!g) {
            free_exact = false;
            break;
        }
        exact_free[r] = *g;
    }
    const bool use_exact = exact_a && free_exact;
    if (options.mode == ScalarMode::Exact && !use_exact)
        throw std::invalid_argument("exact mode needs rational leading coefficient and free values");

    sol.family.resonances = compute_resonances(poly, fam, a);

    if (use_exact) {
        sol.exact = true;
        sol.exact_leading = exact_a;
        sol.leading = exact_a->to_complex();
        fill(sol, solve_impl<GaussRational>(poly, fam, *exact_a, exact_free, options.order));
    } else {
        fill(sol, solve_impl<Complex>(poly, fam, a, options.free_values, options.order));
    }

    const int n = fam.branch_order;
    sol.residual_start = residual_floor(poly, fam.start_index(), n);
    const double scale = monomial_scale(poly, sol.leading);
    const Complex lead_defect = sol.residual.coeff(sol.residual_start);
    if (sol.forced || std::abs(lead_defect) > 1e-9 * scale) {
        const bool ok = sol.exact ? lead_defect == Complex(0.0, 0.0) : std::abs(lead_defect) <= 1e-9 * scale;
        sol.compatibility.insert(sol.compatibility.begin(), {0, Rational(0), ok, std::abs(lead_defect)});
    }
    double worst = 0.0;
    for (int j = 0; j <= options.order; ++j) {
        const bool skipped = std::any_of(sol.compatibility.begin(), sol.compatibility.end(),
                                         [j](const CompatibilityCheck& c) { return c.order == j && !c.satisfied; });
        if (!skipped) worst = std::max(worst, std::abs(sol.residual.coeff(sol.residual_start + j)));
    }
    sol.residual_norm = worst;
    return sol;
}

std::vector<Rational> bernoulli_numbers(int m) {
    std::vector<Rational> B(static_cast<size_t>(m + 1), Rational(0));
    B[0] = 1;
    for (int k = 1; k <= m; ++k) {
        Rational acc(0);
        BigInt binom = 1;  // C(k+1, i)
        for (int i = 0; i < k; ++i) {
            acc += Rational(binom) * B[static_cast<size_t>(i)];
            binom = binom * (k + 1 - i) / (i + 1);
        }
        B[static_cast<size_t>(k)] = -acc / (k + 1);
    }
    return B;
}

PuiseuxSeries<GaussRational> cot_laurent(int K) {
    if (K < 1) throw std::invalid_argument("cot expansion needs K >= 1");
    // cot x = sum_k (-1)^k 2^(2k) B_(2k) x^(2k-1) / (2k)!
    const int kmax = (K + 1) / 2;
    const auto B = bernoulli_numbers(2 * kmax);
    std::vector<GaussRational> c(static_cast<size_t>(K + 2), GaussRational(0));
    BigInt fact = 1;
    BigInt two_pow = 1;
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            fact *= BigInt(2 * k - 1) * (2 * k);
            two_pow *= 4;
        }
        const int index = 2 * k - 1;
        if (index > K) break;
        Rational v = Rational(two_pow) * B[static_cast<size_t>(2 * k)] / Rational(fact);
        if (k % 2 == 1) v = -v;
        c[static_cast<size_t>(index + 1)] = GaussRational(v);
    }
    return PuiseuxSeries<GaussRational>::from_coefficients(-1, std::move(c), 1, K);
}

}  // namespace movsing
