#pragma once

// Closed-form checks around the width equation a'' + w^2 a = a^-3: linear
// oscillator bases, the quadratic-form superposition, the invariant, the
// third-order equation for a^2, Moebius maps and the Riccati reduction.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "movsing/scalar.hpp"

namespace movsing {

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitialPair {
    Complex value;
    Complex derivative;
};

/// Two solutions of eta'' + w^2 eta = 0 with the given initial data at t = 0.
class OscillatorBasis {
public:
    OscillatorBasis(Complex omega, InitialPair u_ic, InitialPair v_ic);

    Complex omega() const { return omega_; }
    /// Wronskian u v' - u' v (constant).
    Complex wronskian() const { return W_; }

    Complex u(Complex t, int derivative = 0) const { return eval(u_ic_, t, derivative); }
    Complex v(Complex t, int derivative = 0) const { return eval(v_ic_, t, derivative); }

private:
    Complex eval(const InitialPair& ic, Complex t, int derivative) const;

    Complex omega_;
    InitialPair u_ic_;
    InitialPair v_ic_;
    Complex W_;
};

/// u(0) = 1, u'(0) = 0, v(0) = 0, v'(0) = 1.
OscillatorBasis oscillator_basis(Complex omega);
OscillatorBasis oscillator_basis(Complex omega, InitialPair u_ic, InitialPair v_ic);

struct QuadFormParams {
    Complex A, B, C;
};

struct ConstraintVerdict {
    Complex ac_minus_b2;
    Complex b2_minus_ac;
    Complex target;                 // 1 / W^2
    bool ac_convention = false;     // AC - B^2 = 1/W^2
    bool b2_convention = false;     // B^2 - AC = 1/W^2
    std::string label;
};

ConstraintVerdict constraint_verdict(const QuadFormParams& params, Complex wronskian);

/// a(t) = sqrt(A u^2 + 2B u v + C v^2) with analytic derivatives.
class PinneySolution {
public:
    PinneySolution(QuadFormParams params, OscillatorBasis basis);

    const QuadFormParams& params() const { return params_; }
    const OscillatorBasis& basis() const { return basis_; }

    /// The quadratic form Q = a^2 and its t-derivatives up to 3.
    Complex quadratic(Complex t, int derivative = 0) const;
    /// a, a', a'' (principal square root of Q).
    Complex value(Complex t) const;
    Complex derivative(Complex t) const;
    Complex second_derivative(Complex t) const;

    /// Throws DomainError naming the first sample where Re Q <= 0 on [a, b].
    void require_positive(double a, double b, int samples = 2000) const;

private:
    QuadFormParams params_;
    OscillatorBasis basis_;
};

PinneySolution pinney_solution(const QuadFormParams& params, const OscillatorBasis& basis);

/// a'' + w^2 a - a^-3.
Complex ep_residual(Complex alpha, Complex alpha_dd, Complex omega);

struct CruzSolution {
    PinneySolution solution;
    int sign = 1;
    double ic_error = 0.0;   // max(|a(0) - a0|, |a'(0) - a0'|)
    bool ic_ok = false;
    std::string flag;        // "normalization mismatch" when ic_ok is false
};

/// Initial-value form with eta_1 = v (eta_1(0) = 0) and eta_2 = u (eta_2(0) = 1);
/// `basis` must carry the default normalization.
CruzSolution cruz_solution(Complex alpha0, Complex dalpha0, const OscillatorBasis& basis, int sign);

/// I = (1/2) [ (eta' a - eta a')^2 + (eta / a)^2 ].
Complex ermakov_invariant(Complex eta, Complex deta, Complex alpha, Complex dalpha);

using ComplexFunction = std::function<Complex(double)>;

/// k-th derivative (k = 1..4) of f at t by central differences with
/// Richardson extrapolation over a shrinking step sequence.
Complex numeric_derivative(const ComplexFunction& f, double t, int k, double h0 = 0.0);

/// t -> x''' + 4 w^2 x' (+ 4 w w' x with constant w) using numeric derivatives.
ComplexFunction third_order_residual(ComplexFunction x, Complex omega);

/// Point of the extended complex plane.
struct ExtendedComplex {
    Complex value{0.0, 0.0};
    bool infinite = false;

    static ExtendedComplex infinity() { return {Complex(0.0, 0.0), true}; }
};

class Mobius {
public:
    Mobius(Complex a, Complex b, Complex c, Complex d);

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }
    Complex determinant() const { return a_ * d_ - b_ * c_; }

    ExtendedComplex operator()(ExtendedComplex t) const;
    ExtendedComplex operator()(Complex t) const { return (*this)(ExtendedComplex{t, false}); }

    /// (this o other)(t) = this(other(t)).
    Mobius compose(const Mobius& other) const;

private:
    Complex a_, b_, c_, d_;
};

ExtendedComplex mobius_transform(Complex t, const Mobius& m);

struct RiccatiState {
    Complex y_real;   // a'/a
    Complex y_imag;   // 1/a^2
    Complex y;        // y_real + i y_imag
};

RiccatiState riccati_state(Complex alpha, Complex dalpha);

/// Y' + Y^2 + w^2 with Y = a'/a + i/a^2; equals (EP residual)/a.
Complex riccati_residual(Complex alpha, Complex dalpha, Complex ddalpha, Complex omega);

}  // namespace movsing
