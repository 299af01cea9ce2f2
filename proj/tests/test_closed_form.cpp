#include <doctest.h>

#include <numbers>
#include <random>

#include "movsing/closed_form.hpp"

using namespace movsing;

namespace {

constexpr double kPi = std::numbers::pi;

LocalSolution pole_series(const DifferentialPolynomial& poly, int order = 10) {
    for (const auto& f : find_balances(poly))
        if (f.p == -1 && f.consistent) {
            LocalSolveOptions opts;
            opts.order = order;
            return solve_local_series(poly, f, f.leading_coeffs.front(), opts);
        }
    throw std::runtime_error("no pole family");
}

DifferentialPolynomial width(long long w) {
    return normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(w)}});
}

}  // namespace

TEST_CASE("cotangent equation: period pi, h0 = 0, residual 0 through order 10") {
    const auto poly = normalize(parse_ode("y' + 1 + y^2"), {});
    const auto local = pole_series(poly);
    auto cand = build_periodic(local);
    verify_candidate(cand, poly, 10);
    CHECK(cand.kind == CandidateKind::SimplyPeriodic);
    REQUIRE(cand.exact_L);
    CHECK(*cand.exact_L == GaussRational(1));
    REQUIRE(cand.exact_h0);
    CHECK(cand.exact_h0->is_zero());
    CHECK(std::abs(cand.period - kPi) < 1e-14);
    CHECK(cand.verified);
    CHECK(cand.residual_norm == 0.0);
    CHECK(cand.verified_through == 10);
    for (const auto& m : cand.matching) CHECK(m.agrees);
    for (double t : {0.3, 1.1, 2.5})
        CHECK(std::abs(cand.evaluate(t) - std::cos(t) / std::sin(t)) < 1e-12);
}

TEST_CASE("random periods are recovered exactly") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(1, 9);
    for (int trial = 0; trial < 25; ++trial) {
        const Rational L(d(rng), d(rng));
        CAPTURE(to_string(L));
        const auto poly = normalize(parse_ode("y' + L + y^2"), {{"L", GaussRational(L)}});
        auto cand = build_periodic(pole_series(poly));
        verify_candidate(cand, poly, 10);
        REQUIRE(cand.exact_L);
        CHECK(*cand.exact_L == GaussRational(L));
        CHECK(cand.exact_h0->is_zero());
        CHECK(std::abs(cand.period - kPi / std::sqrt(to_double(L))) < 1e-12);
        CHECK(cand.verified);
    }
}

TEST_CASE("w'' - 2 w^3: rational candidate 1/tau, no periodic candidate") {
    const auto poly = normalize(parse_ode("y'' - 2*y^3"), {});
    const auto local = pole_series(poly);
    CHECK_FALSE(elliptic_admissible(local));
    const auto cand = build_rational(local, 2);
    CHECK(cand.kind == CandidateKind::Rational);
    CHECK(cand.verified);
    CHECK(cand.residual_norm == 0.0);
    REQUIRE(cand.pole_order() == 1);
    const Complex a = cand.pole_part[0];
    CHECK(std::abs(std::abs(a) - 1.0) < 1e-15);
    for (const auto& c : cand.tail) CHECK(c == Complex(0.0, 0.0));
    CHECK(std::abs(cand.evaluate(0.25) - a / 0.25) < 1e-14);
    CHECK_THROWS_AS(build_periodic(local), ClosedFormError);
}

TEST_CASE("a corrupted candidate fails verification at the first wrong order") {
    const auto poly = normalize(parse_ode("y' + 1 + y^2"), {});
    auto cand = build_periodic(pole_series(poly));
    cand.h0 = 0.5;
    cand.exact_h0 = GaussRational(Rational(1, 2));
    verify_candidate(cand, poly, 10);
    CHECK_FALSE(cand.verified);
    CHECK(cand.residual_norm > 0.0);
    REQUIRE(cand.first_failing_order);
}

TEST_CASE("branch-point data has no periodic candidate") {
    const auto poly = width(1);
    for (const auto& f : find_balances(poly)) {
        if (!f.consistent) continue;
        const auto local = solve_local_series(poly, f, f.leading_coeffs.front());
        try {
            build_periodic(local);
            FAIL("expected ClosedFormError");
        } catch (const ClosedFormError& e) {
            CHECK(std::string(e.what()).find("no periodic candidate") == 0);
        }
    }
}

TEST_CASE("quartic period formula on the cotangent equation") {
    // c_{-1} = 1, c_3 = -1/45: T^4 = pi^4 / (-1), principal root pi e^{-i pi/4}.
    const auto poly = normalize(parse_ode("y' + 1 + y^2"), {});
    const auto local = pole_series(poly);
    const auto q = quartic_period_formula(local, Complex(kPi, 0.0));
    const Complex hand = kPi * std::polar(1.0, -kPi / 4);
    CHECK(std::abs(q.principal - hand) < 1e-12);
    CHECK_FALSE(q.principal_consistent);
    CHECK_FALSE(q.any_branch_consistent);
    CHECK(q.modulus_consistent);
    CHECK(std::abs(q.corrected - kPi) < 1e-12);
    CHECK(q.corrected_consistent);
}

TEST_CASE("claimed pole data for the width equation") {
    const auto poly = width(1);
    const auto data = claimed_pole_data(poly, GaussRational(1), Rational(1));
    REQUIRE(data.exact_series);
    const auto& s = *data.exact_series;
    CHECK(s.coeff(-1) == GaussRational(0, 1));
    CHECK(s.coeff(0).is_zero());
    CHECK(s.coeff(1) == GaussRational(0, Rational(-2, 3)));
    CHECK(s.coeff(2) == GaussRational(Rational(-4, 25), Rational(-3, 25)));
    CHECK(s.coeff(3) == GaussRational(Rational(-2003, 2500), Rational(1931, 3750)));

    auto cand = build_periodic(data);
    verify_candidate(cand, poly, 10);
    CHECK_FALSE(cand.verified);
    CHECK(cand.residual_norm > 0.0);
    REQUIRE(cand.first_failing_order);
    CHECK(*cand.first_failing_order == 0);
}

TEST_CASE("claimed coefficients against the forced recursion") {
    const auto rows = compare_claimed_coefficients(width(1), GaussRational(1), Rational(1));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].name == "a_-1");
    CHECK_FALSE(rows[0].computed);
    CHECK(rows[1].name == "a_0");
    CHECK(rows[1].match);
    CHECK(rows[2].name == "a_1");
    CHECK_FALSE(rows[2].match);
    REQUIRE(rows[2].computed);
    CHECK(std::abs(*rows[2].computed - Complex(0, -1.0 / 6)) < 1e-15);
    CHECK_FALSE(rows[3].match);
    CHECK_FALSE(rows[4].match);
}
