#pragma once

// Truncated formal Puiseux series  sum_j c_j * tau^(j/n).
//
// A series is either exact (every coefficient outside the stored range is
// zero) or truncated at index K (coefficients are known for j <= K only).
// Arithmetic tracks the guaranteed index of every result; nothing past it is
// ever read.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "movsing/scalar.hpp"

namespace movsing {

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultSeriesOrder = 12;

template <class S>
class PuiseuxSeries {
public:
    PuiseuxSeries() = default;

    /// The zero series, exact or known through `truncation`.
    static PuiseuxSeries zero(int branch_order = 1, std::optional<int> truncation = std::nullopt) {
        PuiseuxSeries s;
        s.set_branch_order(branch_order);
        s.trunc_ = truncation;
        return s;
    }

    /// c * tau^(index/n), exact unless a truncation is given.
    static PuiseuxSeries monomial(S c, int index, int branch_order = 1,
                                  std::optional<int> truncation = std::nullopt) {
        PuiseuxSeries s = zero(branch_order, truncation);
        if (truncation && index > *truncation) return s;
        s.start_ = index;
        s.coeffs_.push_back(std::move(c));
        s.trim();
        return s;
    }

    /// Coefficients c[0], c[1], ... at indices start, start+1, ...
    static PuiseuxSeries from_coefficients(int start, std::vector<S> coeffs, int branch_order = 1,
                                           std::optional<int> truncation = std::nullopt) {
        PuiseuxSeries s = zero(branch_order, truncation);
        s.start_ = start;
        s.coeffs_ = std::move(coeffs);
        if (truncation) {
            const int keep = *truncation - start + 1;
            if (keep < static_cast<int>(s.coeffs_.size()))
                s.coeffs_.resize(static_cast<size_t>(std::max(keep, 0)));
        }
        s.trim();
        return s;
    }

    int branch_order() const { return n_; }
    bool is_exact() const { return !trunc_.has_value(); }
    std::optional<int> truncation() const { return trunc_; }

    /// First stored index (may hold zeros only if the series is zero).
    int start() const { return start_; }
    int end_index() const { return start_ + static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<S>& coefficients() const { return coeffs_; }

    /// Index of the first nonzero coefficient; nullopt if none is known.
    std::optional<int> valuation() const {
        for (size_t i = 0; i < coeffs_.size(); ++i)
            if (!is_exact_zero(coeffs_[i])) return start_ + static_cast<int>(i);
        return std::nullopt;
    }

    /// True for the exact zero series.
    bool is_zero() const { return is_exact() && !valuation(); }

    /// Coefficient at index j; throws if j lies beyond the truncation.
    S coeff(int j) const {
        if (trunc_ && j > *trunc_)
            throw SeriesError("coefficient index " + std::to_string(j) + " beyond truncation " +
                              std::to_string(*trunc_));
        if (j < start_ || j > end_index()) return S(0);
        return coeffs_[static_cast<size_t>(j - start_)];
    }

    /// Same series written in tau^(1/m), m a multiple of the branch order.
    PuiseuxSeries with_branch_order(int m) const {
        if (m <= 0 || m % n_ != 0) throw SeriesError("branch order must be a positive multiple");
        const int f = m / n_;
        if (f == 1) return *this;
        PuiseuxSeries s = zero(m, trunc_ ? std::optional<int>(*trunc_ * f + (f - 1)) : std::nullopt);
        // Coefficients between multiples of f are exactly zero, so the
        // refined series is known up to the next coarse index minus one.
        s.start_ = start_ * f;
        s.coeffs_.assign(coeffs_.empty() ? 0 : (coeffs_.size() - 1) * f + 1, S(0));
        for (size_t i = 0; i < coeffs_.size(); ++i) s.coeffs_[i * f] = coeffs_[i];
        s.trim();
        return s;
    }

    /// Drops everything beyond index K.
    PuiseuxSeries truncated(int K) const {
        if (trunc_ && *trunc_ < K) K = *trunc_;
        std::vector<S> c;
        for (int j = start_; j <= std::min(K, end_index()); ++j) c.push_back(coeff(j));
        return from_coefficients(start_, std::move(c), n_, K);
    }

    template <class T>
    PuiseuxSeries<T> cast() const {
        std::vector<T> c;
        c.reserve(coeffs_.size());
        for (const auto& x : coeffs_) {
            if constexpr (std::is_same_v<T, Complex>) {
                c.push_back(to_complex(x));
            } else {
                static_assert(std::is_same_v<T, S>, "only widening casts are supported");
                c.push_back(x);
            }
        }
        return PuiseuxSeries<T>::from_coefficients(start_, std::move(c), n_, trunc_);
    }

    /// Evaluates the stored terms at tau = r * exp(i*theta), using
    /// tau^(j/n) = r^(j/n) * exp(i*theta*j/n) so the branch follows theta.
    Complex evaluate_polar(double r, double theta) const {
        Complex acc(0.0, 0.0);
        for (size_t i = 0; i < coeffs_.size(); ++i) {
            const double e = static_cast<double>(start_ + static_cast<int>(i)) / n_;
            acc += to_complex(coeffs_[i]) * std::polar(std::pow(r, e), theta * e);
        }
        return acc;
    }

    Complex evaluate(Complex tau) const { return evaluate_polar(std::abs(tau), std::arg(tau)); }

    PuiseuxSeries operator-() const {
        PuiseuxSeries s = *this;
        for (auto& c : s.coeffs_) c = -c;
        return s;
    }

    PuiseuxSeries& operator*=(const S& k) {
        for (auto& c : coeffs_) c = c * k;
        trim();
        return *this;
    }

    friend PuiseuxSeries operator*(PuiseuxSeries s, const S& k) { return s *= k; }
    friend PuiseuxSeries operator*(const S& k, PuiseuxSeries s) { return s *= k; }

    friend PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        return combine(a, b, 1);
    }
    friend PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        return combine(a, b, -1);
    }

    friend PuiseuxSeries operator*(const PuiseuxSeries& a_in, const PuiseuxSeries& b_in) {
        const int n = std::lcm(a_in.n_, b_in.n_);
        const PuiseuxSeries a = a_in.with_branch_order(n);
        const PuiseuxSeries b = b_in.with_branch_order(n);
        if (a.is_zero() || b.is_zero()) {
            return zero(n);
        }
        // Lower bounds on the valuation of each factor.
        const int va = a.valuation().value_or(a.trunc_ ? *a.trunc_ + 1 : 0);
        const int vb = b.valuation().value_or(b.trunc_ ? *b.trunc_ + 1 : 0);
        std::optional<int> trunc;
        if (a.trunc_) trunc = *a.trunc_ + vb;
        if (b.trunc_) trunc = trunc ? std::min(*trunc, *b.trunc_ + va) : *b.trunc_ + va;

        PuiseuxSeries out = zero(n, trunc);
        if (a.coeffs_.empty() || b.coeffs_.empty()) return out;
        out.start_ = a.start_ + b.start_;
        int last = a.end_index() + b.end_index();
        if (trunc) last = std::min(last, *trunc);
        if (last < out.start_) return out;
        out.coeffs_.assign(static_cast<size_t>(last - out.start_ + 1), S(0));
        for (size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (is_exact_zero(a.coeffs_[i])) continue;
            for (size_t j = 0; j < b.coeffs_.size(); ++j) {
                const size_t k = i + j;
                if (k >= out.coeffs_.size()) break;
                out.coeffs_[k] = out.coeffs_[k] + a.coeffs_[i] * b.coeffs_[j];
            }
        }
        out.trim();
        return out;
    }

    friend bool operator==(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        if (a.n_ != b.n_ || a.trunc_ != b.trunc_) return false;
        const int lo = std::min(a.start_, b.start_);
        const int hi = std::max(a.end_index(), b.end_index());
        for (int j = lo; j <= hi; ++j)
            if (a.coeff(j) != b.coeff(j)) return false;
        return true;
    }

private:
    void set_branch_order(int n) {
        if (n <= 0) throw SeriesError("branch order must be positive");
        n_ = n;
    }

    // Removes leading/trailing zero coefficients from storage.
    void trim() {
        size_t lead = 0;
        while (lead < coeffs_.size() && is_exact_zero(coeffs_[lead])) ++lead;
        if (lead == coeffs_.size()) {
            coeffs_.clear();
            start_ = 0;
            return;
        }
        if (lead > 0) {
            coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(lead));
            start_ += static_cast<int>(lead);
        }
        while (!coeffs_.empty() && is_exact_zero(coeffs_.back())) coeffs_.pop_back();
    }

    static PuiseuxSeries combine(const PuiseuxSeries& a_in, const PuiseuxSeries& b_in, int sign) {
        const int n = std::lcm(a_in.n_, b_in.n_);
        const PuiseuxSeries a = a_in.with_branch_order(n);
        const PuiseuxSeries b = b_in.with_branch_order(n);
        std::optional<int> trunc = a.trunc_;
        if (b.trunc_) trunc = trunc ? std::min(*trunc, *b.trunc_) : b.trunc_;
        PuiseuxSeries out = zero(n, trunc);
        const bool a_has = !a.coeffs_.empty();
        const bool b_has = !b.coeffs_.empty();
        if (!a_has && !b_has) return out;
        int lo = a_has ? a.start_ : b.start_;
        int hi = a_has ? a.end_index() : b.end_index();
        if (b_has) {
            lo = std::min(lo, b.start_);
            hi = std::max(hi, b.end_index());
        }
        if (trunc) hi = std::min(hi, *trunc);
        if (hi < lo) return out;
        out.start_ = lo;
        out.coeffs_.reserve(static_cast<size_t>(hi - lo + 1));
        for (int j = lo; j <= hi; ++j) {
            S x = a.raw(j);
            S y = b.raw(j);
            out.coeffs_.push_back(sign > 0 ? x + y : x - y);
        }
        out.trim();
        return out;
    }

    S raw(int j) const {
        if (j < start_ || j > end_index()) return S(0);
        return coeffs_[static_cast<size_t>(j - start_)];
    }

    template <class>
    friend class PuiseuxSeries;

    int n_ = 1;
    int start_ = 0;
    std::vector<S> coeffs_;
    std::optional<int> trunc_;
};

/// Multiplicative inverse. `precision` counts terms beyond the leading one
/// and is required (defaulting to kDefaultSeriesOrder) for exact inputs.
template <class S>
PuiseuxSeries<S> series_inverse(const PuiseuxSeries<S>& s, std::optional<int> precision = std::nullopt) {
    const auto v = s.valuation();
    if (!v) throw SeriesError("inversion of a zero series");
    int rel = precision.value_or(kDefaultSeriesOrder);
    if (!s.is_exact()) rel = std::min(rel, *s.truncation() - *v);
    const S lead = s.coeff(*v);
    const S inv_lead = S(1) / lead;
    std::vector<S> b(static_cast<size_t>(rel + 1), S(0));
    b[0] = inv_lead;
    for (int i = 1; i <= rel; ++i) {
        S acc(0);
        for (int l = 1; l <= i; ++l) {
            const int j = *v + l;
            if (j > s.end_index()) break;
            acc = acc + s.coeff(j) * b[static_cast<size_t>(i - l)];
        }
        b[static_cast<size_t>(i)] = -(acc * inv_lead);
    }
    return PuiseuxSeries<S>::from_coefficients(-*v, std::move(b), s.branch_order(), -*v + rel);
}

template <class S>
PuiseuxSeries<S> series_pow(const PuiseuxSeries<S>& s, int e, std::optional<int> precision = std::nullopt) {
    if (e == 0) return PuiseuxSeries<S>::monomial(S(1), 0, s.branch_order());
    if (e < 0) return series_pow(series_inverse(s, precision), -e);
    PuiseuxSeries<S> result = PuiseuxSeries<S>::monomial(S(1), 0, s.branch_order());
    PuiseuxSeries<S> base = s;
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return result;
}

/// k-th derivative in tau, termwise with rational exponent factors.
template <class S>
PuiseuxSeries<S> series_differentiate(const PuiseuxSeries<S>& s, int k = 1) {
    if (k < 0) throw SeriesError("derivative order must be nonnegative");
    if (k == 0) return s;
    const int n = s.branch_order();
    std::vector<S> out;
    const int start = s.start() - k * n;
    for (int j = s.start(); j <= s.end_index(); ++j) {
        Rational factor(1);
        for (int i = 0; i < k; ++i) factor *= Rational(j - i * n, n);
        out.push_back(s.coeff(j) * scalar_from<S>(GaussRational(factor)));
    }
    std::optional<int> trunc;
    if (s.truncation()) trunc = *s.truncation() - k * n;
    if (s.coefficients().empty()) return PuiseuxSeries<S>::zero(n, trunc);
    return PuiseuxSeries<S>::from_coefficients(start, std::move(out), n, trunc);
}

}  // namespace movsing
