#include "movsing/exactlab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace movsing {

OscillatorBasis::OscillatorBasis(Complex omega, InitialPair u_ic, InitialPair v_ic)
    : omega_(omega), u_ic_(u_ic), v_ic_(v_ic) {
    W_ = u_ic.value * v_ic.derivative - u_ic.derivative * v_ic.value;
    if (W_ == Complex(0.0, 0.0)) throw std::invalid_argument("oscillator basis is linearly dependent (W = 0)");
}

Complex OscillatorBasis::eval(const InitialPair& ic, Complex t, int derivative) const {
    if (derivative < 0) throw std::invalid_argument("derivative order must be nonnegative");
    // eta = x C + y S with C = cos(w t), S = sin(w t)/w (or 1, t when w = 0);
    // C' = -w^2 S and S' = C.
    Complex x = ic.value;
    Complex y = ic.derivative;
    const Complex w2 = omega_ * omega_;
    for (int k = 0; k < derivative; ++k) {
        const Complex nx = y;
        y = -w2 * x;
        x = nx;
    }
    Complex C, S;
    if (omega_ == Complex(0.0, 0.0)) {
        C = 1.0;
        S = t;
    } else {
        C = std::cos(omega_ * t);
        S = std::sin(omega_ * t) / omega_;
    }
    return x * C + y * S;
}

OscillatorBasis oscillator_basis(Complex omega) {
    return OscillatorBasis(omega, {1.0, 0.0}, {0.0, 1.0});
}

OscillatorBasis oscillator_basis(Complex omega, InitialPair u_ic, InitialPair v_ic) {
    return OscillatorBasis(omega, u_ic, v_ic);
}

ConstraintVerdict constraint_verdict(const QuadFormParams& p, Complex wronskian) {
    ConstraintVerdict v;
    v.ac_minus_b2 = p.A * p.C - p.B * p.B;
    v.b2_minus_ac = -v.ac_minus_b2;
    v.target = 1.0 / (wronskian * wronskian);
    const double tol = 1e-12 * std::max(1.0, std::abs(v.target));
    v.ac_convention = std::abs(v.ac_minus_b2 - v.target) <= tol;
    v.b2_convention = std::abs(v.b2_minus_ac - v.target) <= tol;
    if (v.ac_convention) {
        v.label = "AC-B^2 convention";
    } else if (v.b2_convention) {
        v.label = "B^2-AC convention";
    } else {
        v.label = "neither convention";
    }
    return v;
}

PinneySolution::PinneySolution(QuadFormParams params, OscillatorBasis basis)
    : params_(params), basis_(basis) {}

Complex PinneySolution::quadratic(Complex t, int derivative) const {
    if (derivative < 0 || derivative > 3) throw std::invalid_argument("quadratic form derivative must be 0..3");
    // Leibniz rule on u*u, u*v, v*v.
    static constexpr std::array<std::array<int, 4>, 4> binom{{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};
    Complex uu(0.0), uv(0.0), vv(0.0);
    for (int i = 0; i <= derivative; ++i) {
        const double b = binom[static_cast<size_t>(derivative)][static_cast<size_t>(i)];
        const Complex ui = basis_.u(t, i), vi = basis_.v(t, i);
        const Complex uj = basis_.u(t, derivative - i), vj = basis_.v(t, derivative - i);
        uu += b * ui * uj;
        uv += b * ui * vj;
        vv += b * vi * vj;
    }
    return params_.A * uu + 2.0 * params_.B * uv + params_.C * vv;
}

Complex PinneySolution::value(Complex t) const { return std::sqrt(quadratic(t)); }

Complex PinneySolution::derivative(Complex t) const {
    return quadratic(t, 1) / (2.0 * value(t));
}

Complex PinneySolution::second_derivative(Complex t) const {
    const Complex a = value(t);
    const Complex q1 = quadratic(t, 1);
    return quadratic(t, 2) / (2.0 * a) - q1 * q1 / (4.0 * a * a * a);
}

void PinneySolution::require_positive(double a, double b, int samples) const {
    for (int i = 0; i <= samples; ++i) {
        const double t = a + (b - a) * i / samples;
        const Complex q = quadratic(t);
        if (q.real() <= 0.0 || std::abs(q.imag()) > 1e-12 * std::max(1.0, std::abs(q)))
            throw DomainError("quadratic form is not positive at t = " + std::to_string(t));
    }
}

PinneySolution pinney_solution(const QuadFormParams& params, const OscillatorBasis& basis) {
    return PinneySolution(params, basis);
}

Complex ep_residual(Complex alpha, Complex alpha_dd, Complex omega) {
    return alpha_dd + omega * omega * alpha - 1.0 / (alpha * alpha * alpha);
}

CruzSolution cruz_solution(Complex alpha0, Complex dalpha0, const OscillatorBasis& basis, int sign) {
    if (alpha0 == Complex(0.0, 0.0)) throw std::invalid_argument("initial width must be nonzero");
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    // eta_1 = v multiplies (a0'^2 + 1/a0^2), eta_2 = u multiplies a0^2.
    QuadFormParams p{alpha0 * alpha0, static_cast<double>(sign) * dalpha0 * alpha0,
                     dalpha0 * dalpha0 + 1.0 / (alpha0 * alpha0)};
    CruzSolution out{PinneySolution(p, basis), sign, 0.0, false, ""};
    out.ic_error = std::max(std::abs(out.solution.value(0.0) - alpha0),
                            std::abs(out.solution.derivative(0.0) - dalpha0));
    out.ic_ok = out.ic_error <= 1e-8;
    if (!out.ic_ok) out.flag = "normalization mismatch";
    return out;
}

Complex ermakov_invariant(Complex eta, Complex deta, Complex alpha, Complex dalpha) {
    if (alpha == Complex(0.0, 0.0)) throw DomainError("invariant is singular at alpha = 0");
    const Complex cross = deta * alpha - eta * dalpha;
    const Complex ratio = eta / alpha;
    return 0.5 * (cross * cross + ratio * ratio);
}

namespace {

Complex central_difference(const ComplexFunction& f, double t, int k, double h) {
    switch (k) {
        case 1:
            return (f(t + h) - f(t - h)) / (2.0 * h);
        case 2:
            return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        case 3:
            return (f(t + 2 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2 * h)) / (2.0 * h * h * h);
        case 4:
            return (f(t + 2 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2 * h)) /
                   (h * h * h * h);
        default:
            throw std::invalid_argument("numeric derivative order must be 1..4");
    }
}

}  // namespace

Complex numeric_derivative(const ComplexFunction& f, double t, int k, double h0) {
    if (k < 1 || k > 4) throw std::invalid_argument("numeric derivative order must be 1..4");
    if (h0 <= 0.0) h0 = 0.1 * k;
    constexpr int ntab = 12;
    constexpr double con = 1.4;
    constexpr double con2 = con * con;
    std::array<std::array<Complex, ntab>, ntab> a{};
    double h = h0;
    a[0][0] = central_difference(f, t, k, h);
    double err = std::numeric_limits<double>::max();
    Complex ans = a[0][0];
    for (int i = 1; i < ntab; ++i) {
        h /= con;
        a[0][static_cast<size_t>(i)] = central_difference(f, t, k, h);
        double fac = con2;
        for (int j = 1; j <= i; ++j) {
            auto& cur = a[static_cast<size_t>(j)][static_cast<size_t>(i)];
            const auto& left = a[static_cast<size_t>(j - 1)][static_cast<size_t>(i)];
            const auto& diag = a[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)];
            cur = (left * fac - diag) / (fac - 1.0);
            fac *= con2;
            const double errt = std::max(std::abs(cur - left), std::abs(cur - diag));
            if (errt <= err) {
                err = errt;
                ans = cur;
            }
        }
        if (std::abs(a[static_cast<size_t>(i)][static_cast<size_t>(i)] -
                     a[static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)]) >= 2.0 * err)
            break;
    }
    return ans;
}

ComplexFunction third_order_residual(ComplexFunction x, Complex omega) {
    return [x = std::move(x), omega](double t) {
        return numeric_derivative(x, t, 3) + 4.0 * omega * omega * numeric_derivative(x, t, 1);
    };
}

Mobius::Mobius(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
    const Complex det = a * d - b * c;
    const double scale = std::max({std::abs(a * d), std::abs(b * c), 1e-300});
    if (std::abs(det) <= 1e-14 * scale)
        throw std::invalid_argument("degenerate Moebius coefficients: ad - bc = 0");
}

ExtendedComplex Mobius::operator()(ExtendedComplex t) const {
    if (t.infinite) {
        if (c_ == Complex(0.0, 0.0)) return ExtendedComplex::infinity();
        return {a_ / c_, false};
    }
    const Complex den = c_ * t.value + d_;
    if (den == Complex(0.0, 0.0)) return ExtendedComplex::infinity();
    return {(a_ * t.value + b_) / den, false};
}

Mobius Mobius::compose(const Mobius& o) const {
    return Mobius(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_);
}

ExtendedComplex mobius_transform(Complex t, const Mobius& m) { return m(t); }

RiccatiState riccati_state(Complex alpha, Complex dalpha) {
    if (alpha == Complex(0.0, 0.0)) throw DomainError("Riccati variable is singular at alpha = 0");
    RiccatiState s;
    s.y_real = dalpha / alpha;
    s.y_imag = 1.0 / (alpha * alpha);
    s.y = s.y_real + Complex(0.0, 1.0) * s.y_imag;
    return s;
}

Complex riccati_residual(Complex alpha, Complex dalpha, Complex ddalpha, Complex omega) {
    const RiccatiState s = riccati_state(alpha, dalpha);
    const Complex a2 = alpha * alpha;
    const Complex dy_real = (ddalpha * alpha - dalpha * dalpha) / a2;
    const Complex dy_imag = -2.0 * dalpha / (a2 * alpha);
    const Complex dy = dy_real + Complex(0.0, 1.0) * dy_imag;
    return dy + s.y * s.y + omega * omega;
}

}  // namespace movsing
