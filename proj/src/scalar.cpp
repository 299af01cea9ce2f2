#include "movsing/scalar.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace movsing {

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(x, &exp);
    // 53-bit integer mantissa
    auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(scaled);
    BigInt p = 1;
    p <<= std::abs(exp);
    if (exp >= 0) return r * Rational(p);
    return r / Rational(p);
}

std::optional<Rational> parse_decimal(std::string_view text) {
    size_t i = 0;
    BigInt digits = 0;
    int frac_digits = 0;
    bool any = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        digits = digits * 10 + (text[i] - '0');
        ++i;
        any = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            digits = digits * 10 + (text[i] - '0');
            ++frac_digits;
            ++i;
            any = true;
        }
    }
    if (!any) return std::nullopt;
    long long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        int sign = 1;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            sign = text[i] == '-' ? -1 : 1;
            ++i;
        }
        bool exp_any = false;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            exp10 = exp10 * 10 + (text[i] - '0');
            if (exp10 > 4000) return std::nullopt;
            ++i;
            exp_any = true;
        }
        if (!exp_any) return std::nullopt;
        exp10 *= sign;
    }
    if (i != text.size()) return std::nullopt;
    exp10 -= frac_digits;
    BigInt p = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::llabs(exp10)));
    Rational r(digits);
    return exp10 >= 0 ? r * Rational(p) : r / Rational(p);
}

std::optional<Rational> rationalize(double x, long long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    const double scale_tol = tol * std::max(1.0, std::abs(x));
    // Continued-fraction convergents h/k.
    long long h_prev = 1, h = static_cast<long long>(std::floor(x));
    long long k_prev = 0, k = 1;
    double frac = x - std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        if (std::abs(static_cast<double>(h) / static_cast<double>(k) - x) <= scale_tol)
            return Rational(h) / Rational(k);
        if (frac < 1e-300) break;
        const double inv = 1.0 / frac;
        const double a_d = std::floor(inv);
        if (a_d > 1e12) break;
        const auto a = static_cast<long long>(a_d);
        frac = inv - a_d;
        const long long h_next = a * h + h_prev;
        const long long k_next = a * k + k_prev;
        if (k_next > max_den) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    if (std::abs(static_cast<double>(h) / static_cast<double>(k) - x) <= scale_tol)
        return Rational(h) / Rational(k);
    return std::nullopt;
}

std::string GaussRational::str() const {
    if (im_ == 0) return to_string(re_);
    std::string im_part;
    if (im_ == 1) {
        im_part = "i";
    } else if (im_ == -1) {
        im_part = "-i";
    } else {
        im_part = to_string(im_) + "i";
    }
    if (re_ == 0) return im_part;
    if (im_part[0] != '-') im_part = "+" + im_part;
    return to_string(re_) + im_part;
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
    if (im_ == 0 && o.im_ == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero Gaussian rational");
    if (o.im_ == 0) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    const Rational n = o.norm();
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
}

GaussRational pow(const GaussRational& base, int e) {
    if (e < 0) return GaussRational(1) / pow(base, -e);
    GaussRational result(1);
    GaussRational b = base;
    while (e > 0) {
        if (e & 1) result *= b;
        b *= b;
        e >>= 1;
    }
    return result;
}

std::optional<GaussRational> rationalize(Complex z, long long max_den, double tol) {
    const double scale = std::max(1.0, std::abs(z));
    auto re = rationalize(z.real(), max_den, tol * scale);
    auto im = rationalize(z.imag(), max_den, tol * scale);
    if (!re || !im) return std::nullopt;
    return GaussRational(*re, *im);
}

namespace {

// Splits "re±imi" into signed real and imaginary literal pieces.
struct ComplexPieces {
    std::string re;
    std::string im;
    int re_sign = 1;
    int im_sign = 1;
    bool has_re = false;
    bool has_im = false;
};

std::optional<ComplexPieces> split_complex(std::string_view raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
    if (text.empty()) return std::nullopt;
    ComplexPieces out;
    // Locate the sign separating real and imaginary parts (not an exponent sign).
    size_t split = std::string::npos;
    for (size_t i = 1; i < text.size(); ++i) {
        if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
            split = i;
        }
    }
    auto take = [](std::string piece, int& sign) {
        sign = 1;
        if (!piece.empty() && (piece[0] == '+' || piece[0] == '-')) {
            sign = piece[0] == '-' ? -1 : 1;
            piece.erase(0, 1);
        }
        return piece;
    };
    auto assign = [&](const std::string& piece) -> bool {
        if (piece.empty()) return false;
        int sign = 1;
        std::string body = take(piece, sign);
        if (!body.empty() && body.back() == 'i') {
            if (out.has_im) return false;
            body.pop_back();
            if (body.empty()) body = "1";
            out.im = body;
            out.im_sign = sign;
            out.has_im = true;
        } else {
            if (out.has_re) return false;
            out.re = body;
            out.re_sign = sign;
            out.has_re = true;
        }
        return true;
    };
    if (split == std::string::npos) {
        if (!assign(text)) return std::nullopt;
    } else {
        if (!assign(text.substr(0, split)) || !assign(text.substr(split))) return std::nullopt;
    }
    return out;
}

}  // namespace

std::optional<GaussRational> parse_gauss_decimal(std::string_view text) {
    auto pieces = split_complex(text);
    if (!pieces) return std::nullopt;
    Rational re(0), im(0);
    if (pieces->has_re) {
        auto r = parse_decimal(pieces->re);
        if (!r) return std::nullopt;
        re = *r * pieces->re_sign;
    }
    if (pieces->has_im) {
        auto r = parse_decimal(pieces->im);
        if (!r) return std::nullopt;
        im = *r * pieces->im_sign;
    }
    return GaussRational(re, im);
}

std::optional<Complex> parse_complex(std::string_view text) {
    auto pieces = split_complex(text);
    if (!pieces) return std::nullopt;
    auto num = [](const std::string& s) -> std::optional<double> {
        if (s == "pi") return M_PI;
        if (!parse_decimal(s)) return std::nullopt;
        return std::stod(s);
    };
    double re = 0.0, im = 0.0;
    if (pieces->has_re) {
        auto v = num(pieces->re);
        if (!v) return std::nullopt;
        re = *v * pieces->re_sign;
    }
    if (pieces->has_im) {
        auto v = num(pieces->im);
        if (!v) return std::nullopt;
        im = *v * pieces->im_sign;
    }
    return Complex(re, im);
}

}  // namespace movsing
