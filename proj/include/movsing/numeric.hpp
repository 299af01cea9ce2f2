#pragma once

// Adaptive Dormand-Prince 5(4) integration of the width equation and the
// linear oscillator along piecewise-straight paths in complex time, plus
// singularity probing and series comparisons on the resulting samples.

#include <optional>
#include <string>
#include <vector>

#include "movsing/exactlab.hpp"
#include "movsing/local_series.hpp"
#include "movsing/scalar.hpp"

namespace movsing {

class ComplexPath {
public:
    explicit ComplexPath(std::vector<Complex> waypoints);

    const std::vector<Complex>& waypoints() const { return waypoints_; }
    double length() const { return cumulative_.back(); }
    /// Arc length at the start of each segment (size = segments + 1).
    const std::vector<double>& cumulative() const { return cumulative_; }
    Complex point_at(double s) const;

    /// Parses "a:b[:c...]" with complex literals such as 0, 1.5, 0.999i, 1-2i.
    static ComplexPath parse(const std::string& text);

private:
    std::vector<Complex> waypoints_;
    std::vector<double> cumulative_;
};

enum class OdeKind { ErmakovPinney, LinearOscillator };

const char* to_string(OdeKind kind);

struct OdeSpec {
    OdeKind kind = OdeKind::ErmakovPinney;
    Complex omega{1.0, 0.0};
};

struct TrajectorySample {
    Complex t;
    Complex alpha;
    Complex dalpha;
    double s = 0.0;  // arc length along the path
};

struct ComplexTrajectory {
    OdeSpec ode;
    std::vector<TrajectorySample> samples;
    std::string method = "dopri5";
    double tol = 0.0;
    int accepted = 0;
    int rejected = 0;
    bool halted = false;
    std::string halt_reason;
};

struct IntegrateOptions {
    double tol = 1e-10;
    /// When set, samples are recorded on this arc-length grid (plus the path
    /// end) and steps land exactly on it; otherwise every accepted step.
    std::optional<double> sample_spacing;
    long max_steps = 2000000;
};

ComplexTrajectory integrate(const OdeSpec& ode, InitialPair ic, const ComplexPath& path,
                            const IntegrateOptions& options = {});

struct IntegrationJob {
    OdeSpec ode;
    InitialPair ic;
    ComplexPath path;
    IntegrateOptions options;
};

/// Runs independent jobs concurrently; results are in input order.
std::vector<ComplexTrajectory> integrate_batch(const std::vector<IntegrationJob>& jobs,
                                               unsigned max_threads = 0);

enum class SingularityKind { None, ZeroOfAlpha };

const char* to_string(SingularityKind kind);

struct SingularityProbe {
    SingularityKind kind = SingularityKind::None;
    Complex t_star{0.0, 0.0};
    Complex newton_estimate{0.0, 0.0};
    int fit_samples = 0;
    std::string note;
};

/// Locates the zero of alpha^2 ahead of the trajectory end by a least-squares
/// quadratic fit of alpha^2 over the last samples.
SingularityProbe detect_singularity(const ComplexTrajectory& traj, int window = 6);

struct ExponentFit {
    bool resolved = false;
    double nu = 0.0;
    double ci_half_width = 0.0;  // 95 %
    double r2 = 0.0;
    double d_lo = 0.0;
    double d_hi = 0.0;
    int samples = 0;
    std::string note;
};

/// Slope of log|alpha| against log|t - t_star| over one decade of distances
/// starting at d_lo (default: the smallest sampled distance).
ExponentFit fit_local_exponent(const ComplexTrajectory& traj, Complex t_star,
                               std::optional<double> d_lo = std::nullopt);

struct InvariantDrift {
    Complex initial{0.0, 0.0};
    double max_drift = 0.0;
    int samples = 0;
};

/// Evaluates the invariant on samples shared by both trajectories.
InvariantDrift invariant_drift(const ComplexTrajectory& eta, const ComplexTrajectory& alpha);

struct Annulus {
    double r_in = 0.0;
    double r_out = 0.0;
};

struct SeriesComparisonOptions {
    bool choose_leading = true;  // pick the leading root matching the data
    bool fit_t0 = false;         // refine t0 by matching value and slope
    bool fit_free = false;       // refine positive-resonance free values
};

struct SeriesComparison {
    double max_relative_error = 0.0;
    int points = 0;
    Complex t0{0.0, 0.0};
    Complex leading{0.0, 0.0};
    std::map<Rational, Complex> free_parameters;
    int newton_iterations = 0;
};

/// Compares the truncated local series about t0 to trajectory samples inside
/// the annulus, fixing arg(tau) continuously along each trajectory.
SeriesComparison series_vs_numeric(const LocalSolution& local, Complex t0, Annulus annulus,
                                   const std::vector<ComplexTrajectory>& trajectories,
                                   const SeriesComparisonOptions& options = {});

}  // namespace movsing
