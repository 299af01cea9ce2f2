#pragma once

// JSON fragments for every analysis object, and a deterministic writer
// (insertion-ordered keys, doubles printed with 17 significant digits).

#include <string>

#include <json.hpp>

#include "movsing/balance.hpp"
#include "movsing/closed_form.hpp"
#include "movsing/exactlab.hpp"
#include "movsing/local_series.hpp"
#include "movsing/numeric.hpp"

namespace movsing {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

std::string format_double(double x);
/// Serializes with 2-space indentation; non-finite numbers become null.
std::string dump_json(const Json& j);

Json to_json(Complex z);
Json to_json(const PuiseuxSeries<Complex>& s);
Json to_json(const PuiseuxSeries<GaussRational>& s);  // exact terms as strings
Json to_json(const DifferentialPolynomial& poly);
Json to_json(const BalanceFamily& fam, const DifferentialPolynomial& poly);
Json to_json(const LocalSolution& sol);
Json to_json(const ClosedFormCandidate& cand);
Json to_json(const QuarticPeriodCheck& check);
Json to_json(const CoefficientComparison& row);
Json to_json(const ComplexTrajectory& traj, bool with_samples = true);
Json to_json(const SingularityProbe& probe);
Json to_json(const ExponentFit& fit);
Json to_json(const ConstraintVerdict& v);

/// "pole", "algebraic_branch_point" or "zero".
std::string family_kind(const BalanceFamily& fam);

}  // namespace movsing
