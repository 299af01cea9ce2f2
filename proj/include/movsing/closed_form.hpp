#pragma once

// Exact meromorphic candidates built from local Laurent data: the simply
// periodic cotangent form and the rational form, with substitution checks.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "movsing/local_series.hpp"

namespace movsing {

class ClosedFormError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CandidateKind { SimplyPeriodic, Rational };

const char* to_string(CandidateKind kind);

struct MatchCheck {
    int index = 0;          // tau power
    Complex candidate;
    Complex local;
    bool agrees = false;
};

struct ClosedFormCandidate {
    CandidateKind kind = CandidateKind::Rational;
    std::vector<Complex> pole_part;  // pole_part[k-1] = c_{-k}
    Complex period{0.0, 0.0};        // T, SimplyPeriodic only
    Complex L{0.0, 0.0};             // pi^2 / T^2
    Complex h0{0.0, 0.0};
    std::vector<Complex> tail;       // c_0..c_m, Rational only

    // Exact copies when every parameter is a Gaussian rational.
    std::optional<std::vector<GaussRational>> exact_pole_part;
    std::optional<GaussRational> exact_L;
    std::optional<GaussRational> exact_h0;
    std::optional<std::vector<GaussRational>> exact_tail;

    std::vector<MatchCheck> matching;  // orders beyond the two used for matching

    bool verified = false;
    double residual_norm = 0.0;
    std::optional<int> first_failing_order;
    int verified_through = 0;

    int pole_order() const { return static_cast<int>(pole_part.size()); }
    bool exact() const;

    /// Laurent expansion about the pole through tau^K.
    PuiseuxSeries<Complex> expansion(int K) const;
    std::optional<PuiseuxSeries<GaussRational>> exact_expansion(int K) const;
    /// Closed-form value at tau.
    Complex evaluate(Complex tau) const;
};

/// Necessary condition for an elliptic solution: vanishing residue.
bool elliptic_admissible(const LocalSolution& local);

/// Cotangent candidate matched on the first two orders past the principal part.
ClosedFormCandidate build_periodic(const LocalSolution& local);

/// Principal part plus the polynomial tail c_0..c_m read from the local series.
ClosedFormCandidate build_rational(const LocalSolution& local, int m);

/// Substitutes the candidate's expansion into `poly` through relative order K,
/// stores the max residual coefficient and sets verified (< 1e-10).
double verify_candidate(ClosedFormCandidate& cand, const DifferentialPolynomial& poly, int K);

/// Evaluation of the fourth-root period formula
///   T = pi * (c_{-1}/45)^(1/4) * (c_3)^(-1/4)
/// against the period obtained by coefficient matching.
struct QuarticPeriodCheck {
    Complex principal;
    std::array<Complex, 4> branches;  // principal * i^k
    std::optional<Complex> matched;
    bool principal_consistent = false;   // equals +-matched
    bool any_branch_consistent = false;
    bool modulus_consistent = false;
    Complex corrected;                   // pi * (-c_{-1} / (45 c_3))^(1/4)
    bool corrected_consistent = false;
};

QuarticPeriodCheck quartic_period_formula(const LocalSolution& local,
                                          std::optional<Complex> matched_period = std::nullopt);

/// Laurent data a_{-1} = c*i, a_0 = 0 and the closed-form a_1, a_2, a_3
/// expressions stated for the pole family of the cleared width equation.
LocalSolution claimed_pole_data(const DifferentialPolynomial& poly, const GaussRational& omega,
                                const Rational& c);

struct CoefficientComparison {
    std::string name;                 // "a_-1", "a_0", ...
    Complex claimed;
    std::optional<Complex> computed;  // nullopt: no value is determined
    bool match = false;
    std::string note;
};

/// Side-by-side table of the claimed pole coefficients and the ones the
/// forced recursion produces from the same a_{-1}.
std::vector<CoefficientComparison> compare_claimed_coefficients(const DifferentialPolynomial& poly,
                                                                const GaussRational& omega,
                                                                const Rational& c);

}  // namespace movsing
