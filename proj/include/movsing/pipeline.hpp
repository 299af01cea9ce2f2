#pragma once

// Orchestration shared by the CLI subcommands: each function runs one stage
// of the analysis and returns its JSON section.

#include <optional>
#include <string>
#include <vector>

#include "movsing/report.hpp"

namespace movsing {

inline constexpr const char* kWidthEquation = "y'' + omega^2*y - y^-3";

struct OdeInput {
    std::string raw;
    ParamEnv params;
    DifferentialPolynomial poly;
    bool width_equation = false;  // poly is the cleared a'' + w^2 a = a^-3
};

/// "name=value" bindings; values are exact decimal (optionally imaginary) literals.
ParamEnv parse_param_bindings(const std::vector<std::string>& bindings);

/// `ode` may be "@path". With no ODE the width equation is used and omega
/// defaults to 1.
OdeInput load_ode(const std::optional<std::string>& ode, ParamEnv params);

struct AnalysisOptions {
    int order = kDefaultSeriesOrder;
    int branch_max = 4;
    Rational residue_scale{1};   // c in the claimed a_{-1} = c i
};

Json ode_section(const OdeInput& in);
Json analyze_section(const OdeInput& in, const AnalysisOptions& opts);

struct SeriesRequest {
    std::optional<Rational> family;      // default: first consistent family
    size_t root = 0;
    std::optional<Complex> leading;      // required for families without roots
    std::map<Rational, Complex> free_values;
    bool force = false;
};

Json series_section(const OdeInput& in, const AnalysisOptions& opts, const SeriesRequest& req);
Json closed_form_section(const OdeInput& in, const AnalysisOptions& opts);

struct NumericRequest {
    OdeKind kind = OdeKind::ErmakovPinney;
    Complex omega{1.0, 0.0};
    InitialPair ic{1.0, 0.0};
    std::string path = "0:10";
    double tol = 1e-10;
    std::optional<double> spacing;
    bool with_samples = true;
};

Json integrate_section(const NumericRequest& req);

/// Probes the path and, for real data, its mirror image; defaults suit the
/// free-width branch point at t = i.
Json probe_section(const NumericRequest& req);

struct ExactRequest {
    std::string which = "all";  // pinney|cruz|riccati|invariant|mobius|third-order|all
    Complex omega{1.0, 0.0};
    QuadFormParams quad{2.0, 1.0, 1.0};
    InitialPair alpha0{1.0, 0.0};   // width data for the invariant run
    InitialPair cruz_ic{1.0, 0.5};  // initial-value superposition check
    double t_end = 5.0;
};

Json exact_section(const ExactRequest& req);

/// Local series against integrated trajectories near a computed singularity.
Json series_numeric_section(int order);

/// Every stage on the width equation plus the claims ledger.
Json full_report(const OdeInput& in, const AnalysisOptions& opts);

/// Claim entries {id, anchor, claim, status, evidence} derived from the sections.
Json claims_ledger(const Json& analysis, const Json& closed_form, const Json& exact,
                   const Json& probe, const Json& series_numeric);

/// Flat "path = value" lines for --format text.
std::string text_summary(const Json& j);

}  // namespace movsing
