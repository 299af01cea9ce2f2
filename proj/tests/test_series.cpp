#include <doctest.h>

#include <random>

#include "movsing/balance.hpp"
#include "movsing/local_series.hpp"

using namespace movsing;

namespace {

using QSeries = PuiseuxSeries<GaussRational>;

struct RandomSeries {
    std::mt19937 rng{20261016};

    GaussRational scalar() {
        std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
        return {Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
    }

    QSeries series(int n) {
        std::uniform_int_distribution<int> start(-3, 3), len(0, 6);
        std::vector<GaussRational> c;
        for (int i = len(rng); i > 0; --i) c.push_back(scalar());
        return QSeries::from_coefficients(start(rng), std::move(c), n);
    }

    int branch() { return std::uniform_int_distribution<int>(1, 3)(rng); }
};

}  // namespace

TEST_CASE("ring laws hold exactly over random rational series") {
    RandomSeries gen;
    for (int trial = 0; trial < 1000; ++trial) {
        const QSeries a = gen.series(gen.branch());
        const QSeries b = gen.series(gen.branch());
        const QSeries c = gen.series(gen.branch());
        CAPTURE(trial);
        REQUIRE(a + b == b + a);
        REQUIRE(a * b == b * a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a - a == QSeries::zero(a.branch_order()));
        REQUIRE(a * QSeries::monomial(GaussRational(1), 0) == a);
    }
}

TEST_CASE("product rule for the tau-derivative") {
    RandomSeries gen;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = gen.branch();
        const QSeries a = gen.series(n);
        const QSeries b = gen.series(gen.branch());
        CAPTURE(trial);
        REQUIRE(series_differentiate(a * b) == series_differentiate(a) * b + a * series_differentiate(b));
    }
}

TEST_CASE("inverse and integer powers") {
    RandomSeries gen;
    for (int trial = 0; trial < 100; ++trial) {
        QSeries a = gen.series(gen.branch());
        if (!a.valuation()) continue;
        const QSeries inv = series_inverse(a, 6);
        const QSeries prod = a * inv;
        const int hi = *prod.truncation();
        for (int j = prod.start(); j <= hi; ++j) CHECK(prod.coeff(j) == GaussRational(j == 0 ? 1 : 0));
        CHECK(series_pow(a, 3) == a * a * a);
    }
}

TEST_CASE("truncated series propagate the smaller truncation") {
    const auto a = QSeries::from_coefficients(0, {1, 2, 3}, 1, 2);
    const auto b = QSeries::from_coefficients(-1, {1, 1}, 1);
    CHECK((a * b).truncation() == std::optional<int>(1));
    CHECK((a + b).truncation() == std::optional<int>(2));
    CHECK_THROWS_AS(a.coeff(3), SeriesError);
}

TEST_CASE("cot Laurent coefficients are exact") {
    const auto cot = cot_laurent(7);
    CHECK(cot.coeff(-1) == GaussRational(1));
    CHECK(cot.coeff(1) == GaussRational(Rational(-1, 3)));
    CHECK(cot.coeff(3) == GaussRational(Rational(-1, 45)));
    CHECK(cot.coeff(5) == GaussRational(Rational(-2, 945)));
    CHECK(cot.coeff(7) == GaussRational(Rational(-1, 4725)));
    for (int k = 0; k <= 6; k += 2) CHECK(cot.coeff(k).is_zero());

    const auto B = bernoulli_numbers(6);
    CHECK(B[1] == Rational(-1, 2));
    CHECK(B[2] == Rational(1, 6));
    CHECK(B[4] == Rational(-1, 30));
    CHECK(B[6] == Rational(1, 42));
}

namespace {

const BalanceFamily& family_with(const std::vector<BalanceFamily>& fams, Rational p) {
    for (const auto& f : fams)
        if (f.p == p) return f;
    throw std::runtime_error("family missing");
}

}  // namespace

TEST_CASE("local series of the branch family solves the width equation") {
    const auto poly = normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(1)}});
    const auto fams = find_balances(poly);
    const auto& fam = family_with(fams, Rational(1, 2));
    for (Complex a : fam.leading_coeffs) {
        LocalSolveOptions opts;
        opts.order = 12;
        const auto sol = solve_local_series(poly, fam, a, opts);
        CAPTURE(a);
        CHECK(sol.exact);
        CHECK(sol.residual_norm < 1e-12);
        REQUIRE(sol.exact_series);
        // Exact substitution vanishes through the truncation.
        const auto res = substitute(poly, *sol.exact_series, std::nullopt);
        for (int j = sol.residual_start; j <= sol.residual_start + sol.order; ++j) CHECK(res.coeff(j).is_zero());
        // The resonance at r = 1 is compatible and takes the free value.
        REQUIRE(sol.compatibility.size() == 1);
        CHECK(sol.compatibility[0].satisfied);
        CHECK(sol.free_parameters.count(Rational(1)) == 1);
    }
}

TEST_CASE("free values enter at the resonance and the series stays a solution") {
    const auto poly = normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(1)}});
    const auto fams = find_balances(poly);
    const auto& fam = family_with(fams, Rational(1, 2));
    LocalSolveOptions opts;
    opts.free_values[Rational(1)] = Complex(0.25, -0.5);
    const auto sol = solve_local_series(poly, fam, fam.leading_coeffs.front(), opts);
    CHECK(std::abs(sol.coefficient(2) - Complex(0.25, -0.5)) < 1e-15);
    CHECK(sol.residual_norm < 1e-12);
}

TEST_CASE("forced expansion of the inconsistent pole family") {
    const auto poly = normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(1)}});
    const auto fams = find_balances(poly);
    const auto& fam = family_with(fams, Rational(-1));
    CHECK_THROWS(solve_local_series(poly, fam, Complex(0, 1)));
    LocalSolveOptions opts;
    opts.force = true;
    opts.order = 4;
    const auto sol = solve_local_series(poly, fam, Complex(0, 1), opts);
    CHECK(sol.forced);
    REQUIRE(sol.exact_series);
    CHECK(sol.exact_series->coeff(0).is_zero());
    CHECK(sol.exact_series->coeff(1) == GaussRational(0, Rational(-1, 6)));
    CHECK(sol.exact_series->coeff(2).is_zero());
    CHECK(sol.exact_series->coeff(3) == GaussRational(0, Rational(1, 24)));
    REQUIRE(!sol.compatibility.empty());
    CHECK(sol.compatibility[0].order == 0);
    CHECK_FALSE(sol.compatibility[0].satisfied);
}

TEST_CASE("float mode agrees with exact mode") {
    const auto poly = normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(1)}});
    const auto fams = find_balances(poly);
    const auto& fam = family_with(fams, Rational(1, 2));
    LocalSolveOptions ex, fl;
    fl.mode = ScalarMode::Float;
    const auto a = solve_local_series(poly, fam, fam.leading_coeffs.front(), ex);
    const auto b = solve_local_series(poly, fam, fam.leading_coeffs.front(), fl);
    CHECK_FALSE(b.exact);
    for (int j = 0; j <= 12; ++j) CHECK(std::abs(a.coefficient(j) - b.coefficient(j)) < 1e-12);
}
