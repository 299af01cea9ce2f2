#include <doctest.h>

#include <chrono>

#include "movsing/balance.hpp"

using namespace movsing;

namespace {

DifferentialPolynomial width(long long w) {
    return normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(w)}});
}

std::vector<Rational> exact_resonances(const BalanceFamily& fam) {
    std::vector<Rational> out;
    for (const auto& r : fam.resonances) {
        REQUIRE(r.exact);
        out.push_back(*r.exact);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("falling factorial and monomial exponent") {
    CHECK(falling_factorial(Rational(1, 2), 0) == 1);
    CHECK(falling_factorial(Rational(1, 2), 2) == Rational(-1, 4));
    CHECK(falling_factorial(Rational(-1), 3) == -6);
    const DiffMonomial m{GaussRational(1), {{0, 3}, {2, 1}}};
    CHECK(monomial_exponent(m, Rational(1, 2)) == Rational(0));
    CHECK(monomial_exponent(m, Rational(-1)) == Rational(-6));
}

TEST_CASE("width equation has one consistent family, p = 1/2") {
    const auto start = std::chrono::steady_clock::now();
    const auto fams = find_balances(width(1));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 1.0);

    int consistent = 0;
    for (const auto& f : fams) {
        if (!f.consistent) continue;
        ++consistent;
        CHECK(f.p == Rational(1, 2));
        CHECK(f.branch_order == 2);
        REQUIRE(f.leading_coeffs.size() == 4);
        for (Complex a : f.leading_coeffs) CHECK(std::abs(std::pow(a, 4) + 4.0) < 1e-10);
        CHECK(exact_resonances(f) == std::vector<Rational>{-1, 1});
    }
    CHECK(consistent == 1);
}

TEST_CASE("simple-pole family is reported as inconsistent") {
    const auto fams = find_balances(width(1));
    const auto it = std::find_if(fams.begin(), fams.end(), [](const auto& f) { return f.p == -1; });
    REQUIRE(it != fams.end());
    CHECK_FALSE(it->consistent);
    CHECK(it->singleton_dominant);
    CHECK(it->leading_coeffs.empty());
    CHECK(to_string(it->leading_equation) == "2*a^4 = 0");
    CHECK(it->q == -6);
    CHECK(it->q_uncleared == -3);
    CHECK(it->note.find("only the zero root") != std::string::npos);
}

TEST_CASE("leading equation roots satisfy the leading equation") {
    for (long long w : {0, 1, 3}) {
        for (const auto& f : find_balances(width(w)))
            for (Complex a : f.leading_coeffs) CHECK(std::abs(evaluate(f.leading_equation, a)) < 1e-10);
    }
}

TEST_CASE("w'' - 2 w^3 has a simple pole with resonances -1 and 4") {
    const auto poly = normalize(parse_ode("y'' - 2*y^3"), {});
    const auto fams = find_balances(poly);
    const auto it = std::find_if(fams.begin(), fams.end(), [](const auto& f) { return f.p == -1 && f.consistent; });
    REQUIRE(it != fams.end());
    CHECK(it->leading_coeffs.size() == 2);
    CHECK(exact_resonances(*it) == std::vector<Rational>{-1, 4});
    CHECK(it->is_pole());
}

TEST_CASE("Riccati equation: simple pole, resonance -1 only") {
    const auto poly = normalize(parse_ode("y' + 1 + y^2"), {});
    const auto fams = find_balances(poly);
    const auto it = std::find_if(fams.begin(), fams.end(), [](const auto& f) { return f.p == -1; });
    REQUIRE(it != fams.end());
    REQUIRE(it->consistent);
    REQUIRE(it->exact_leading.front());
    CHECK(*it->exact_leading.front() == GaussRational(1));
    CHECK(exact_resonances(*it) == std::vector<Rational>{-1});
}

TEST_CASE("resonance polynomial agrees in exact and float arithmetic") {
    const auto poly = width(1);
    const auto fams = find_balances(poly);
    for (const auto& f : fams) {
        if (!f.consistent) continue;
        const auto exact = exact_leading_for(f, f.leading_coeffs.front());
        REQUIRE(exact);
        const auto qa = resonance_polynomial(poly, f, *exact);
        const auto fa = resonance_polynomial(poly, f, f.leading_coeffs.front());
        REQUIRE(qa.size() == fa.size());
        for (size_t i = 0; i < qa.size(); ++i) CHECK(std::abs(qa[i].to_complex() - fa[i]) < 1e-12);
    }
}
