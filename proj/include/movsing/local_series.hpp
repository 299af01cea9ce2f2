#pragma once

// Substitution of Puiseux series into differential polynomials and the
// order-by-order solver for local expansions around a movable singularity.

#include <map>
#include <optional>
#include <vector>

#include "movsing/balance.hpp"
#include "movsing/ode_model.hpp"
#include "movsing/puiseux.hpp"

namespace movsing {

class TruncationError : public SeriesError {
public:
    TruncationError(const std::string& message, int required)
        : SeriesError(message), required_(required) {}
    /// Truncation index of the input that would have been sufficient.
    int required_truncation() const { return required_; }

private:
    int required_;
};

/// E[s] for a cleared differential polynomial. With `through` set, throws
/// TruncationError unless the result is known up to that index.
template <class S>
PuiseuxSeries<S> substitute(const DifferentialPolynomial& poly, const PuiseuxSeries<S>& s,
                            std::optional<int> through = std::nullopt);

/// Lowest tau-index any monomial can reach when y starts at index `start`.
int residual_floor(const DifferentialPolynomial& poly, int start, int branch_order);

struct CompatibilityCheck {
    int order = 0;            // relative index j
    Rational resonance;       // j / n
    bool satisfied = false;
    double defect = 0.0;      // |E| at that order before injecting the free value
};

struct LocalSolution {
    BalanceFamily family;
    DifferentialPolynomial equation;
    Complex leading;
    std::optional<GaussRational> exact_leading;
    int order = kDefaultSeriesOrder;  // K, relative orders 0..K in tau^(1/n)
    bool forced = false;              // family inconsistent, solved anyway
    bool exact = false;

    PuiseuxSeries<Complex> series;
    std::optional<PuiseuxSeries<GaussRational>> exact_series;
    std::map<Rational, Complex> free_parameters;
    std::vector<CompatibilityCheck> compatibility;

    PuiseuxSeries<Complex> residual;
    int residual_start = 0;   // index q*n of the lowest residual order
    double residual_norm = 0.0;  // max |E_j|, j = 0..K, skipping unsatisfied orders

    int branch_order() const { return series.branch_order(); }
    int start_index() const { return family.start_index(); }
    /// Coefficient at relative order j, i.e. of tau^(p + j/n).
    Complex coefficient(int j) const { return series.coeff(start_index() + j); }
};

enum class ScalarMode { Auto, Exact, Float };

struct LocalSolveOptions {
    int order = kDefaultSeriesOrder;
    std::map<Rational, Complex> free_values;  // resonance r -> value, default 0
    bool force = false;                       // allow an inconsistent leading term
    ScalarMode mode = ScalarMode::Auto;
};

/// Solves E = 0 order by order from y = a tau^p + ...; resonance orders take
/// the supplied free value and record whether the compatibility holds.
LocalSolution solve_local_series(const DifferentialPolynomial& poly, const BalanceFamily& fam,
                                 Complex a, const LocalSolveOptions& options = {});

/// Laurent expansion of cot(x) through x^K, exact.
PuiseuxSeries<GaussRational> cot_laurent(int K);

/// Bernoulli numbers B_0..B_m (B_1 = -1/2).
std::vector<Rational> bernoulli_numbers(int m);

}  // namespace movsing
