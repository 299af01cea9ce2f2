#include "movsing/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "movsing/roots.hpp"

namespace movsing {

namespace {

constexpr double kPi = std::numbers::pi;

// (-1)^(k-1) / (k-1)!
Rational principal_weight(int k) {
    Rational w(1);
    for (int i = 2; i < k; ++i) w /= i;
    return (k % 2 == 0) ? Rational(-w) : w;
}

// Coefficients in powers of L of the candidate's tau^j coefficient,
// excluding h0.
template <class S>
std::vector<S> order_polynomial(const std::vector<S>& pole, int j, const PuiseuxSeries<GaussRational>& cot) {
    std::vector<S> out;
    const int pp = static_cast<int>(pole.size());
    for (int k = 1; k <= pp; ++k) {
        if ((j + k) % 2 != 0) continue;
        const int i = (j + k) / 2;
        if (i < 0) continue;
        const GaussRational b = cot.coeff(2 * i - 1);
        const Rational ff = falling_factorial(Rational(2 * i - 1), k - 1);
        if (b.is_zero() || ff == 0) continue;
        if (out.size() <= static_cast<size_t>(i)) out.resize(static_cast<size_t>(i) + 1, S(0));
        out[static_cast<size_t>(i)] = out[static_cast<size_t>(i)] +
                                      pole[static_cast<size_t>(k - 1)] *
                                          scalar_from<S>(b * GaussRational(ff * principal_weight(k)));
    }
    return out;
}

template <class S>
PuiseuxSeries<S> periodic_expansion(const std::vector<S>& pole, const S& L, const S& h0, int K) {
    const int pp = static_cast<int>(pole.size());
    const auto cot = cot_laurent(std::max(1, K + pp));
    std::vector<S> coeffs(static_cast<size_t>(K + pp + 1), S(0));
    for (int j = -pp; j <= K; ++j) {
        const auto P = order_polynomial(pole, j, cot);
        S acc = evaluate_polynomial(std::span<const S>(P), L);
        if (j == 0) acc = acc + h0;
        coeffs[static_cast<size_t>(j + pp)] = acc;
    }
    return PuiseuxSeries<S>::from_coefficients(-pp, std::move(coeffs), 1, K);
}

template <class S>
PuiseuxSeries<S> rational_expansion(const std::vector<S>& pole, const std::vector<S>& tail) {
    const int pp = static_cast<int>(pole.size());
    std::vector<S> coeffs;
    for (int k = pp; k >= 1; --k) coeffs.push_back(pole[static_cast<size_t>(k - 1)]);
    for (const auto& c : tail) coeffs.push_back(c);
    return PuiseuxSeries<S>::from_coefficients(-pp, std::move(coeffs), 1);
}

int pole_order_of(const LocalSolution& local, const char* what) {
    if (local.branch_order() != 1)
        throw ClosedFormError(std::string(what) + ": local data is not Laurent (branch order " +
                              std::to_string(local.branch_order()) + ")");
    return -local.start_index();
}

bool same_period(Complex a, Complex b) {
    const double tol = 1e-9 * std::max(1.0, std::abs(b));
    return std::abs(a - b) <= tol || std::abs(a + b) <= tol;
}

Complex clean_zero(Complex z) {
    return {z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag()};
}

}  // namespace

const char* to_string(CandidateKind kind) {
    return kind == CandidateKind::SimplyPeriodic ? "simply_periodic" : "rational";
}

bool ClosedFormCandidate::exact() const {
    if (!exact_pole_part) return false;
    if (kind == CandidateKind::SimplyPeriodic) return exact_L && exact_h0;
    return exact_tail.has_value();
}

PuiseuxSeries<Complex> ClosedFormCandidate::expansion(int K) const {
    if (kind == CandidateKind::SimplyPeriodic) return periodic_expansion(pole_part, L, h0, K);
    return rational_expansion(pole_part, tail);
}

std::optional<PuiseuxSeries<GaussRational>> ClosedFormCandidate::exact_expansion(int K) const {
    if (!exact()) return std::nullopt;
    if (kind == CandidateKind::SimplyPeriodic)
        return periodic_expansion(*exact_pole_part, *exact_L, *exact_h0, K);
    return rational_expansion(*exact_pole_part, *exact_tail);
}

Complex ClosedFormCandidate::evaluate(Complex tau) const {
    if (kind == CandidateKind::Rational) return expansion(0).evaluate(tau);
    const Complex s = std::sqrt(L);
    // d^(k-1)/dz^(k-1) of s*cot(s z), using cot' = -(1 + cot^2) repeatedly on
    // a polynomial in c = cot(s z).
    const Complex c = std::cos(s * tau) / std::sin(s * tau);
    std::vector<Complex> poly{Complex(0.0), Complex(1.0)};  // c
    Complex acc = h0;
    for (int k = 1; k <= pole_order(); ++k) {
        Complex value(0.0);
        for (size_t i = poly.size(); i-- > 0;) value = value * c + poly[i];
        acc += Complex(to_double(principal_weight(k))) * pole_part[static_cast<size_t>(k - 1)] * s *
               value;
        // differentiate in z: d/dz c^m = -m s c^(m-1) (1 + c^2)
        std::vector<Complex> next(poly.size() + 1, Complex(0.0));
        for (size_t m = 1; m < poly.size(); ++m) {
            const Complex f = -static_cast<double>(m) * s * poly[m];
            next[m - 1] += f;
            next[m + 1] += f;
        }
        poly = std::move(next);
    }
    return acc;
}

bool elliptic_admissible(const LocalSolution& local) {
    if (local.branch_order() != 1) throw ClosedFormError("not Laurent; elliptic construction undefined");
    return std::abs(local.series.coeff(-1)) == 0.0;
}

ClosedFormCandidate build_periodic(const LocalSolution& local) {
    const int pp = pole_order_of(local, "no periodic candidate");
    if (pp < 1) throw ClosedFormError("no periodic candidate: local data has no pole");
    const auto trunc = local.series.truncation();
    if (trunc && *trunc < 1)
        throw ClosedFormError("no periodic candidate: local series must reach tau^1");

    ClosedFormCandidate cand;
    cand.kind = CandidateKind::SimplyPeriodic;
    for (int k = 1; k <= pp; ++k) cand.pole_part.push_back(local.series.coeff(-k));
    const auto cot = cot_laurent(std::max(1, pp + 2));

    const auto P1 = order_polynomial(cand.pole_part, 1, cot);
    std::vector<Complex> eq(std::max<size_t>(P1.size(), 1), Complex(0.0));
    for (size_t i = 0; i < P1.size(); ++i) eq[i] = P1[i];
    eq[0] -= local.series.coeff(1);
    double scale = 0.0;
    for (const auto& c : eq) scale = std::max(scale, std::abs(c));
    while (eq.size() > 1 && std::abs(eq.back()) <= 1e-14 * scale) eq.pop_back();
    if (eq.size() < 2)
        throw ClosedFormError("no periodic candidate: the tau^1 coefficient does not involve the period");

    std::vector<Complex> nonzero;
    for (const Complex& r : polynomial_roots(eq))
        if (std::abs(r) > 1e-12) nonzero.push_back(r);
    if (nonzero.empty())
        throw ClosedFormError("no periodic candidate: matching gives L = 0 (infinite period)");
    cand.L = clean_zero(nonzero.front());

    if (local.exact_series) {
        std::vector<GaussRational> pole;
        for (int k = 1; k <= pp; ++k) pole.push_back(local.exact_series->coeff(-k));
        const auto P1x = order_polynomial(pole, 1, cot);
        std::vector<GaussRational> eqx(P1x);
        if (eqx.empty()) eqx.push_back(GaussRational(0));
        eqx[0] -= local.exact_series->coeff(1);
        if (auto Lx = rationalize(cand.L); Lx && evaluate_polynomial(std::span<const GaussRational>(eqx), *Lx).is_zero()) {
            const auto P0 = order_polynomial(pole, 0, cot);
            cand.exact_pole_part = pole;
            cand.exact_L = *Lx;
            cand.exact_h0 = local.exact_series->coeff(0) - evaluate_polynomial(std::span<const GaussRational>(P0), *Lx);
            cand.L = Lx->to_complex();
        }
    }
    if (cand.exact_h0) {
        cand.h0 = cand.exact_h0->to_complex();
    } else {
        const auto P0 = order_polynomial(cand.pole_part, 0, cot);
        cand.h0 = local.series.coeff(0) - evaluate_polynomial(std::span<const Complex>(P0), cand.L);
    }
    cand.period = kPi / std::sqrt(cand.L);

    const int last = trunc ? *trunc : local.series.end_index();
    const auto expansion = cand.expansion(std::max(last, 1));
    for (int j = 2; j <= last; ++j) {
        const Complex x = expansion.coeff(j);
        const Complex y = local.series.coeff(j);
        cand.matching.push_back({j, x, y, std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y))});
    }
    return cand;
}

ClosedFormCandidate build_rational(const LocalSolution& local, int m) {
    if (m < 0) throw std::invalid_argument("tail degree must be nonnegative");
    const int pp = std::max(pole_order_of(local, "rational candidate"), 0);
    const auto trunc = local.series.truncation();
    if (trunc && *trunc < m)
        throw ClosedFormError("rational candidate: tail degree " + std::to_string(m) +
                              " exceeds the local series truncation " + std::to_string(*trunc));
    ClosedFormCandidate cand;
    cand.kind = CandidateKind::Rational;
    for (int k = 1; k <= pp; ++k) cand.pole_part.push_back(local.series.coeff(-k));
    for (int j = 0; j <= m; ++j) cand.tail.push_back(local.series.coeff(j));
    if (local.exact_series) {
        std::vector<GaussRational> pole, tail;
        for (int k = 1; k <= pp; ++k) pole.push_back(local.exact_series->coeff(-k));
        for (int j = 0; j <= m; ++j) tail.push_back(local.exact_series->coeff(j));
        cand.exact_pole_part = std::move(pole);
        cand.exact_tail = std::move(tail);
    }
    verify_candidate(cand, local.equation, std::max(local.order, m));
    return cand;
}

double verify_candidate(ClosedFormCandidate& cand, const DifferentialPolynomial& poly, int K) {
    if (K < 0) throw std::invalid_argument("verification order must be nonnegative");
    const int pp = cand.pole_order();
    PuiseuxSeries<Complex> residual;
    int start = -pp;
    if (auto ex = cand.exact_expansion(-pp + K)) {
        if (pp == 0) start = ex->valuation().value_or(0);
        residual = substitute(poly, *ex).cast<Complex>();
    } else {
        const auto y = cand.expansion(-pp + K);
        if (pp == 0) start = y.valuation().value_or(0);
        residual = substitute(poly, y);
    }
    const int floor = residual_floor(poly, start, 1);
    double worst = 0.0;
    cand.first_failing_order.reset();
    int reached = -1;
    for (int j = 0; j <= K; ++j) {
        const int idx = floor + j;
        if (residual.truncation() && *residual.truncation() < idx) break;
        const double v = std::abs(residual.coeff(idx));
        if (v >= 1e-10 && !cand.first_failing_order) cand.first_failing_order = j;
        worst = std::max(worst, v);
        reached = j;
    }
    cand.residual_norm = worst;
    cand.verified = worst < 1e-10;
    cand.verified_through = reached;
    return worst;
}

QuarticPeriodCheck quartic_period_formula(const LocalSolution& local, std::optional<Complex> matched) {
    pole_order_of(local, "period formula");
    const Complex residue = local.series.coeff(-1);
    if (std::abs(residue) == 0.0) throw ClosedFormError("period formula needs a nonzero residue c_{-1}");
    Complex c3;
    try {
        c3 = local.series.coeff(3);
    } catch (const SeriesError&) {
        throw ClosedFormError("period formula needs the tau^3 coefficient");
    }
    if (std::abs(c3) == 0.0) throw ClosedFormError("period formula needs a nonzero tau^3 coefficient");

    QuarticPeriodCheck out;
    out.principal = kPi * std::pow(clean_zero(residue / 45.0), 0.25) * std::pow(clean_zero(c3), -0.25);
    Complex rot(1.0, 0.0);
    for (auto& b : out.branches) {
        b = out.principal * rot;
        rot *= Complex(0.0, 1.0);
    }
    out.corrected = kPi * std::pow(clean_zero(-residue / (45.0 * c3)), 0.25);
    out.matched = matched;
    if (matched) {
        out.principal_consistent = same_period(out.principal, *matched);
        out.any_branch_consistent =
            std::any_of(out.branches.begin(), out.branches.end(),
                        [&](Complex b) { return same_period(b, *matched); });
        out.modulus_consistent =
            std::abs(std::abs(out.principal) - std::abs(*matched)) <= 1e-9 * std::abs(*matched);
        const Complex m4 = std::pow(*matched, 4);
        out.corrected_consistent = std::abs(std::pow(out.corrected, 4) - m4) <= 1e-9 * std::abs(m4);
    }
    return out;
}

namespace {

struct ClaimedCoefficients {
    GaussRational am1, a0, a1, a2, a3;
};

ClaimedCoefficients claimed_coefficients(const GaussRational& omega, const Rational& c) {
    if (c == 0) throw std::invalid_argument("the residue scale c must be nonzero");
    ClaimedCoefficients k;
    const GaussRational w2 = omega * omega;
    const GaussRational a = GaussRational(Rational(0), c);
    k.am1 = a;
    k.a0 = GaussRational(0);
    k.a1 = -(GaussRational(Rational(2, 3)) * w2 * a);
    const GaussRational d2 = GaussRational(6) * k.a1 + GaussRational(4) * a * k.a1 + GaussRational(2) * w2 * a;
    if (d2.is_zero()) throw ClosedFormError("a_2 expression has a vanishing denominator");
    k.a2 = -(a * k.a1) / d2;
    const GaussRational a2sq = a * a;
    const GaussRational num = GaussRational(1) - GaussRational(2) * a2sq * k.a2 * k.a2 +
                              GaussRational(2) * (GaussRational(1) + GaussRational(3) * w2) * a2sq * k.a1 * k.a1;
    const GaussRational den = GaussRational(2) * a2sq * k.a1 + GaussRational(4) * a2sq +
                              GaussRational(4) * w2 * a2sq * a;
    if (den.is_zero()) throw ClosedFormError("a_3 expression has a vanishing denominator");
    k.a3 = num / den;
    return k;
}

BalanceFamily pole_family(const DifferentialPolynomial& poly) {
    for (const auto& f : find_balances(poly))
        if (f.p == -1) return f;
    BalanceFamily f;
    f.p = -1;
    f.branch_order = 1;
    f.q = Rational(residual_floor(poly, -1, 1));
    f.q_uncleared = f.q + Rational(poly.clearing_multiplier());
    f.note = "no dominant balance at p = -1";
    return f;
}

}  // namespace

LocalSolution claimed_pole_data(const DifferentialPolynomial& poly, const GaussRational& omega,
                                const Rational& c) {
    const auto k = claimed_coefficients(omega, c);
    LocalSolution sol;
    sol.family = pole_family(poly);
    sol.equation = poly;
    sol.exact_leading = k.am1;
    sol.leading = k.am1.to_complex();
    sol.order = 4;
    sol.forced = !sol.family.consistent;
    sol.exact = true;
    sol.exact_series = PuiseuxSeries<GaussRational>::from_coefficients(-1, {k.am1, k.a0, k.a1, k.a2, k.a3}, 1, 3);
    sol.series = sol.exact_series->cast<Complex>();
    sol.residual = substitute(poly, *sol.exact_series).cast<Complex>();
    sol.residual_start = residual_floor(poly, -1, 1);
    double worst = 0.0;
    for (int j = 0; j <= sol.order; ++j) {
        const int idx = sol.residual_start + j;
        if (sol.residual.truncation() && *sol.residual.truncation() < idx) break;
        worst = std::max(worst, std::abs(sol.residual.coeff(idx)));
    }
    sol.residual_norm = worst;
    return sol;
}

std::vector<CoefficientComparison> compare_claimed_coefficients(const DifferentialPolynomial& poly,
                                                                const GaussRational& omega,
                                                                const Rational& c) {
    const auto k = claimed_coefficients(omega, c);
    const BalanceFamily fam = pole_family(poly);
    std::vector<CoefficientComparison> rows;

    CoefficientComparison lead{"a_-1", k.am1.to_complex(), std::nullopt, false, ""};
    if (fam.consistent) {
        Complex best = fam.leading_coeffs.front();
        for (const Complex& a : fam.leading_coeffs)
            if (std::abs(a - lead.claimed) < std::abs(best - lead.claimed)) best = a;
        lead.computed = best;
        lead.match = std::abs(best - lead.claimed) <= 1e-12 * std::max(1.0, std::abs(best));
    } else {
        lead.note = "leading equation " + to_string(fam.leading_equation) +
                    " has no nonzero root; a_-1 is free only when the recursion is forced";
    }
    rows.push_back(lead);

    if (fam.dominant_monomials.empty()) {
        for (const char* name : {"a_0", "a_1", "a_2", "a_3"})
            rows.push_back({name, Complex(0.0), std::nullopt, false, "no recursion at p = -1"});
        return rows;
    }
    LocalSolveOptions opts;
    opts.force = true;
    opts.order = 4;
    const auto forced = solve_local_series(poly, fam, k.am1.to_complex(), opts);
    const GaussRational claimed[4] = {k.a0, k.a1, k.a2, k.a3};
    for (int j = 0; j < 4; ++j) {
        CoefficientComparison row;
        row.name = "a_" + std::to_string(j);
        row.claimed = claimed[j].to_complex();
        row.computed = forced.coefficient(j + 1);
        if (forced.exact_series) {
            row.match = forced.exact_series->coeff(j) == claimed[j];
        } else {
            row.match = std::abs(*row.computed - row.claimed) <= 1e-12 * std::max(1.0, std::abs(row.claimed));
        }
        const bool resonant = std::any_of(forced.compatibility.begin(), forced.compatibility.end(),
                                          [j](const CompatibilityCheck& cc) { return cc.order == j + 1; });
        if (resonant) row.note = "resonant order; value is the injected free parameter";
        rows.push_back(row);
    }
    return rows;
}

}  // namespace movsing
