#pragma once

// Scalar types shared by every module: double-precision complex numbers and
// exact Gaussian rationals (p/q + r/s i) backed by Boost.Multiprecision.

#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace movsing {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// Exact value of a finite double (every finite double is a dyadic rational).
Rational rational_from_double(double x);

/// Parses a decimal literal such as "12", "0.125", "1e-3", "2.5E+2" exactly.
std::optional<Rational> parse_decimal(std::string_view text);

/// Best rational approximation with denominator <= max_den via continued
/// fractions; nullopt when no candidate is within tol of x.
std::optional<Rational> rationalize(double x, long long max_den = 1000000,
                                    double tol = 1e-9);

class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    GaussRational(Rational re, Rational im = Rational(0))
        : re_(std::move(re)), im_(std::move(im)) {}

    const Rational& real() const { return re_; }
    const Rational& imag() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }
    GaussRational conj() const { return {re_, -im_}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }
    Complex to_complex() const { return {to_double(re_), to_double(im_)}; }

    /// "3/4", "-2i", "1/2+3i" style rendering.
    std::string str() const;

    GaussRational operator-() const { return {-re_, -im_}; }
    GaussRational& operator+=(const GaussRational& o);
    GaussRational& operator-=(const GaussRational& o);
    GaussRational& operator*=(const GaussRational& o);
    GaussRational& operator/=(const GaussRational& o);

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

private:
    Rational re_{0};
    Rational im_{0};
};

GaussRational pow(const GaussRational& base, int e);

/// Rationalizes both parts of z; nullopt if either part has no close rational.
std::optional<GaussRational> rationalize(Complex z, long long max_den = 1000000,
                                         double tol = 1e-9);

/// Parses "1.5", "-2i", "0.5-0.25i", "i", "3e-2+1e1i" into an exact value.
std::optional<GaussRational> parse_gauss_decimal(std::string_view text);

/// Double-precision parse of the same complex literal syntax.
std::optional<Complex> parse_complex(std::string_view text);

// Conversions used by the templated series code.
template <class S>
S scalar_from(const GaussRational& g);

template <>
inline Complex scalar_from<Complex>(const GaussRational& g) { return g.to_complex(); }

template <>
inline GaussRational scalar_from<GaussRational>(const GaussRational& g) { return g; }

inline Complex to_complex(const Complex& c) { return c; }
inline Complex to_complex(const GaussRational& g) { return g.to_complex(); }

inline bool is_exact_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
inline bool is_exact_zero(const GaussRational& g) { return g.is_zero(); }

inline double magnitude(const Complex& c) { return std::abs(c); }
inline double magnitude(const GaussRational& g) { return std::abs(g.to_complex()); }

template <class S>
inline constexpr bool is_exact_scalar = std::is_same_v<S, GaussRational>;

}  // namespace movsing
