#include <doctest.h>

#include <random>

#include "movsing/exactlab.hpp"

using namespace movsing;

TEST_CASE("oscillator basis has unit Wronskian and solves the linear equation") {
    for (Complex w : {Complex(1.0), Complex(0.0), Complex(2.5), Complex(1.0, 0.5)}) {
        const auto b = oscillator_basis(w);
        CHECK(b.wronskian() == Complex(1.0));
        for (double t : {0.0, 0.7, 3.1}) {
            CHECK(std::abs(b.u(t, 2) + w * w * b.u(t)) < 1e-12);
            CHECK(std::abs(b.v(t, 2) + w * w * b.v(t)) < 1e-12);
            CHECK(std::abs(b.u(t) * b.v(t, 1) - b.u(t, 1) * b.v(t) - 1.0) < 1e-12);
        }
    }
    CHECK_THROWS_AS(oscillator_basis(1.0, {1.0, 0.0}, {2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("superposition with AC - B^2 = 1/W^2 solves the width equation") {
    const auto basis = oscillator_basis(1.0);
    const auto pin = pinney_solution({2.0, 1.0, 1.0}, basis);
    pin.require_positive(0.0, 5.0);
    for (double t = 0.0; t <= 5.0; t += 0.05)
        CHECK(std::abs(ep_residual(pin.value(t), pin.second_derivative(t), 1.0)) < 1e-8);

    const auto v = constraint_verdict({2.0, 1.0, 1.0}, basis.wronskian());
    CHECK(v.ac_convention);
    CHECK_FALSE(v.b2_convention);
    CHECK(v.label == "AC-B^2 convention");
}

TEST_CASE("the B^2 - AC sign does not give a solution") {
    // B^2 - AC = 1 with A = 1, B = sqrt2, C = 1.
    const QuadFormParams q{1.0, std::sqrt(2.0), 1.0};
    const auto v = constraint_verdict(q, 1.0);
    CHECK(v.b2_convention);
    CHECK(v.label == "B^2-AC convention");
    const auto pin = pinney_solution(q, oscillator_basis(1.0));
    CHECK(std::abs(ep_residual(pin.value(0.2), pin.second_derivative(0.2), 1.0)) > 1e-3);
    CHECK_THROWS_AS(pinney_solution({-1.0, 0.0, -1.0}, oscillator_basis(1.0)).require_positive(0, 1), DomainError);
}

TEST_CASE("free width sqrt(1 + t^2) and the constant width") {
    const auto free_w = pinney_solution({1.0, 0.0, 1.0}, oscillator_basis(0.0));
    for (double t : {0.0, 0.5, 2.0}) CHECK(std::abs(free_w.value(t) - std::sqrt(1 + t * t)) < 1e-14);
    const auto one = pinney_solution({1.0, 0.0, 1.0}, oscillator_basis(1.0));
    for (double t : {0.0, 1.3, 4.0}) CHECK(std::abs(one.value(t) - 1.0) < 1e-14);
}

TEST_CASE("initial-value form: plus sign reproduces the data, minus sign is flagged") {
    const auto basis = oscillator_basis(1.0);
    const auto plus = cruz_solution(1.0, 0.5, basis, 1);
    CHECK(plus.ic_ok);
    CHECK(plus.flag.empty());
    const auto minus = cruz_solution(1.0, 0.5, basis, -1);
    CHECK_FALSE(minus.ic_ok);
    CHECK(minus.flag == "normalization mismatch");
    // With zero initial velocity the sign is irrelevant.
    CHECK(cruz_solution(0.8, 0.0, basis, -1).ic_ok);
    for (double t : {0.0, 1.0, 2.0})
        CHECK(std::abs(ep_residual(plus.solution.value(t), plus.solution.second_derivative(t), 1.0)) < 1e-10);
}

TEST_CASE("invariant of exact solutions") {
    // eta = sin t, a = 1 with w = 1: I = 1/2.
    for (double t : {0.0, 0.4, 2.0, 7.0})
        CHECK(std::abs(ermakov_invariant(std::sin(t), std::cos(t), 1.0, 0.0) - 0.5) < 1e-14);
    // eta = t, a = sqrt(1 + t^2) with w = 0: I = 1/2.
    for (double t : {0.0, 0.4, 2.0, 7.0}) {
        const double a = std::sqrt(1 + t * t);
        CHECK(std::abs(ermakov_invariant(t, 1.0, a, t / a) - 0.5) < 1e-14);
    }
    CHECK(ermakov_invariant(0.0, 0.0, 2.0, 1.0) == Complex(0.0));
    CHECK_THROWS_AS(ermakov_invariant(1.0, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("numeric derivatives") {
    const ComplexFunction f = [](double t) { return Complex(std::sin(t), std::exp(t)); };
    for (int k = 1; k <= 4; ++k) {
        const double t = 0.7;
        const Complex exact((k % 4 == 1) ? std::cos(t) : (k % 4 == 2) ? -std::sin(t) : (k % 4 == 3) ? -std::cos(t) : std::sin(t),
                            std::exp(t));
        CHECK(std::abs(numeric_derivative(f, t, k) - exact) < 1e-7);
    }
    CHECK_THROWS_AS(numeric_derivative(f, 0.0, 5), std::invalid_argument);
}

TEST_CASE("a^2 satisfies the third-order linear equation") {
    const auto pin = pinney_solution({2.0, 1.0, 1.0}, oscillator_basis(1.0));
    const auto r = third_order_residual([&pin](double t) { return pin.quadratic(t); }, 1.0);
    for (double t = 0.0; t <= 5.0; t += 0.25) CHECK(std::abs(r(t)) < 1e-6);
    // Analytic check on the same identity.
    for (double t : {0.1, 2.2}) CHECK(std::abs(pin.quadratic(t, 3) + 4.0 * pin.quadratic(t, 1)) < 1e-12);
}

TEST_CASE("Moebius maps compose like 2x2 matrices") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto rc = [&] { return Complex(u(rng), u(rng)); };
    for (int trial = 0; trial < 200; ++trial) {
        const Mobius f(rc(), rc(), rc(), rc());
        const Mobius g(rc(), rc(), rc(), rc());
        const Complex t = rc();
        const auto lhs = f(g(t));
        const auto rhs = f.compose(g)(t);
        REQUIRE(lhs.infinite == rhs.infinite);
        if (!lhs.infinite) CHECK(std::abs(lhs.value - rhs.value) < 1e-8 * std::max(1.0, std::abs(lhs.value)));
    }
}

TEST_CASE("Moebius maps on the extended plane") {
    const Mobius m(1.0, 2.0, 1.0, -1.0);
    CHECK(m(Complex(1.0)).infinite);
    const auto inf = m(ExtendedComplex::infinity());
    CHECK_FALSE(inf.infinite);
    CHECK(inf.value == Complex(1.0));
    CHECK(Mobius(2.0, 1.0, 0.0, 1.0)(ExtendedComplex::infinity()).infinite);
    CHECK_THROWS_AS(Mobius(1.0, 2.0, 2.0, 4.0), std::invalid_argument);
    CHECK(std::abs(m.determinant() - Complex(-3.0)) < 1e-15);
}

TEST_CASE("Riccati reduction") {
    const auto pin = pinney_solution({2.0, 1.0, 1.0}, oscillator_basis(1.0));
    for (double t = 0.0; t <= 5.0; t += 0.1)
        CHECK(std::abs(riccati_residual(pin.value(t), pin.derivative(t), pin.second_derivative(t), 1.0)) < 1e-6);
    const auto s = riccati_state(2.0, 1.0);
    CHECK(s.y_real == Complex(0.5));
    CHECK(s.y_imag == Complex(0.25));
    // a = t is not a solution: residual (EP residual)/a at t = 2 with w = 1.
    CHECK(std::abs(riccati_residual(2.0, 1.0, 0.0, 1.0) - Complex(0.9375)) < 1e-15);
    // At t = 1 the same trial function happens to give zero.
    CHECK(std::abs(riccati_residual(1.0, 1.0, 0.0, 1.0)) < 1e-15);
    CHECK_THROWS_AS(riccati_state(0.0, 1.0), DomainError);
}
