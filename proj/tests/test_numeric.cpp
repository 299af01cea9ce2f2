#include <doctest.h>

#include <numbers>

#include "movsing/numeric.hpp"

using namespace movsing;

namespace {

constexpr double kPi = std::numbers::pi;

const OdeSpec kWidth1{OdeKind::ErmakovPinney, 1.0};
const OdeSpec kWidth0{OdeKind::ErmakovPinney, 0.0};

IntegrateOptions opts(double tol, std::optional<double> spacing = std::nullopt) {
    IntegrateOptions o;
    o.tol = tol;
    o.sample_spacing = spacing;
    return o;
}

// Samples of f(t) = (t - t0)^nu along a ray, distances log-spaced in [1e-3, 1].
ComplexTrajectory synthetic(Complex t0, double nu, double angle) {
    ComplexTrajectory tr;
    for (int i = 200; i >= 0; --i) {
        const double d = std::pow(10.0, -3.0 + 3.0 * i / 200.0);
        const Complex tau = std::polar(d, angle);
        tr.samples.push_back({t0 + tau, std::pow(tau, nu), nu * std::pow(tau, nu - 1.0), 0.0});
    }
    return tr;
}

}  // namespace

TEST_CASE("complex paths") {
    const auto p = ComplexPath::parse("0:1:1+1i");
    CHECK(p.waypoints().size() == 3);
    CHECK(std::abs(p.length() - 2.0) < 1e-15);
    CHECK(std::abs(p.point_at(1.5) - Complex(1.0, 0.5)) < 1e-15);
    CHECK(ComplexPath::parse("0:0.999i").waypoints()[1] == Complex(0.0, 0.999));
    CHECK_THROWS_AS(ComplexPath::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(ComplexPath::parse("0:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(ComplexPath::parse("0:x"), std::invalid_argument);
}

TEST_CASE("constant width at omega = 1") {
    const auto tr = integrate(kWidth1, {1.0, 0.0}, ComplexPath({0.0, 10.0}), opts(1e-10));
    CHECK_FALSE(tr.halted);
    CHECK(std::abs(tr.samples.back().t - 10.0) < 1e-14);
    for (const auto& s : tr.samples) CHECK(std::abs(s.alpha - 1.0) < 1e-8);
    CHECK(detect_singularity(tr).kind == SingularityKind::None);
}

TEST_CASE("free width sqrt(1 + t^2)") {
    const auto tr = integrate(kWidth0, {1.0, 0.0}, ComplexPath({0.0, 3.0}), opts(1e-10, 0.05));
    for (const auto& s : tr.samples) CHECK(std::abs(s.alpha - std::sqrt(1.0 + s.t * s.t)) < 1e-7);
    // Tighter tolerance gives a smaller error.
    const auto err = [](double tol) {
        const auto t = integrate(kWidth0, {1.0, 0.0}, ComplexPath({0.0, 3.0}), opts(tol));
        return std::abs(t.samples.back().alpha - std::sqrt(10.0));
    };
    CHECK(err(1e-11) < err(1e-7));
}

TEST_CASE("linear oscillator") {
    const auto tr = integrate({OdeKind::LinearOscillator, 1.0}, {0.0, 1.0}, ComplexPath({0.0, kPi / 2}), opts(1e-10));
    CHECK(std::abs(tr.samples.back().alpha - 1.0) < 1e-8);
    CHECK(detect_singularity(tr).kind == SingularityKind::None);
}

TEST_CASE("integration halts near the branch point") {
    const auto tr = integrate(kWidth0, {1.0, 0.0}, ComplexPath({0.0, Complex(0.0, 2.0)}), opts(1e-10));
    CHECK(tr.halted);
    CHECK_FALSE(tr.halt_reason.empty());
    CHECK(std::abs(tr.samples.back().t - Complex(0.0, 1.0)) < 1e-3);
}

TEST_CASE("branch point of the free width at t = i") {
    const auto path = ComplexPath::parse("0:0.999i");
    const auto tr = integrate(kWidth0, {1.0, 0.0}, path, opts(1e-12, path.length() / 4000));
    const auto probe = detect_singularity(tr);
    REQUIRE(probe.kind == SingularityKind::ZeroOfAlpha);
    CHECK(std::abs(probe.t_star - Complex(0.0, 1.0)) < 1e-3);
    const auto fit = fit_local_exponent(tr, probe.t_star);
    REQUIRE(fit.resolved);
    CHECK(std::abs(fit.nu - 0.5) < 0.02);
    CHECK(fit.r2 > 0.99);
    CHECK(fit.samples >= 8);
}

TEST_CASE("exponent fit recovers synthetic powers") {
    for (double nu : {-1.0, -0.5, 0.5, 1.0, 2.0}) {
        CAPTURE(nu);
        const auto fit = fit_local_exponent(synthetic(Complex(0.3, 1.0), nu, 2.0), Complex(0.3, 1.0));
        REQUIRE(fit.resolved);
        CHECK(std::abs(fit.nu - nu) < 0.02);
    }
    // cot(t - t0) behaves like 1/(t - t0).
    ComplexTrajectory tr;
    for (int i = 200; i >= 0; --i) {
        const double d = std::pow(10.0, -3.0 + 3.0 * i / 200.0);
        const Complex tau = std::polar(d, 0.4);
        tr.samples.push_back({1.0 + tau, std::cos(tau) / std::sin(tau), 0.0, 0.0});
    }
    const auto fit = fit_local_exponent(tr, 1.0);
    REQUIRE(fit.resolved);
    CHECK(std::abs(fit.nu + 1.0) < 0.02);
}

TEST_CASE("exponent fit needs enough samples") {
    auto tr = synthetic(0.0, 0.5, 0.0);
    tr.samples.resize(5);
    const auto fit = fit_local_exponent(tr, 0.0);
    CHECK_FALSE(fit.resolved);
    CHECK(fit.note.find("unresolved") != std::string::npos);
}

TEST_CASE("path independence away from singularities") {
    const InitialPair ic{0.8, 0.1};
    const Complex end(0.5, 0.5);
    const double tol = 1e-10;
    const auto a = integrate(kWidth1, ic, ComplexPath({0.0, end}), opts(tol));
    const auto b = integrate(kWidth1, ic, ComplexPath({0.0, 0.5, end}), opts(tol));
    const auto c = integrate(kWidth1, ic, ComplexPath({0.0, Complex(0.0, 0.3), end}), opts(tol));
    CHECK(std::abs(a.samples.back().alpha - b.samples.back().alpha) < 10 * tol);
    CHECK(std::abs(a.samples.back().alpha - c.samples.back().alpha) < 10 * tol);
    CHECK(std::abs(a.samples.back().dalpha - b.samples.back().dalpha) < 10 * tol);
}

TEST_CASE("invariant drift shrinks with the tolerance") {
    std::vector<double> drift;
    const std::vector<double> tols{1e-8, 1e-10, 1e-12};
    for (double tol : tols) {
        const ComplexPath path({0.0, 10.0});
        const auto trs = integrate_batch({{{OdeKind::LinearOscillator, 1.0}, {0.0, 1.0}, path, opts(tol, 0.1)},
                                          {kWidth1, {1.0, 0.0}, path, opts(tol, 0.1)}});
        const auto d = invariant_drift(trs[0], trs[1]);
        CHECK(std::abs(d.initial - 0.5) < 1e-15);
        drift.push_back(d.max_drift);
    }
    CHECK(drift[1] < 1e-8);
    CHECK(drift[0] > drift[1]);
    CHECK(drift[1] > drift[2]);
    // Log-log slope against tol is close to one.
    const double slope = (std::log(drift[0]) - std::log(drift[2])) / (std::log(tols[0]) - std::log(tols[2]));
    CHECK(slope > 0.7);
    CHECK(slope < 1.5);
}

TEST_CASE("invariant drift edge cases") {
    const ComplexPath path({0.0, 10.0});
    const auto eta0 = integrate({OdeKind::LinearOscillator, 1.0}, {0.0, 0.0}, path, opts(1e-10, 0.1));
    const auto alpha = integrate(kWidth1, {1.0, 0.0}, path, opts(1e-10, 0.1));
    CHECK(invariant_drift(eta0, alpha).max_drift == 0.0);
    const auto coarse = integrate(kWidth1, {1.0, 0.0}, path, opts(1e-10, 0.5));
    CHECK_THROWS_AS(invariant_drift(eta0, coarse), std::invalid_argument);

    // Free particle and free width.
    const auto eta = integrate({OdeKind::LinearOscillator, 0.0}, {0.0, 1.0}, ComplexPath({0.0, 5.0}), opts(1e-11, 0.1));
    const auto a0 = integrate(kWidth0, {1.0, 0.0}, ComplexPath({0.0, 5.0}), opts(1e-11, 0.1));
    CHECK(invariant_drift(eta, a0).max_drift < 1e-8);
}

TEST_CASE("batch results match serial runs and keep input order") {
    std::vector<IntegrationJob> jobs;
    for (int k = 0; k < 6; ++k)
        jobs.push_back({kWidth1, {0.5 + 0.1 * k, 0.0}, ComplexPath({0.0, 2.0}), opts(1e-10, 0.1)});
    const auto par = integrate_batch(jobs, 4);
    REQUIRE(par.size() == jobs.size());
    for (size_t k = 0; k < jobs.size(); ++k) {
        const auto ser = integrate(jobs[k].ode, jobs[k].ic, jobs[k].path, jobs[k].options);
        REQUIRE(ser.samples.size() == par[k].samples.size());
        for (size_t i = 0; i < ser.samples.size(); ++i) CHECK(ser.samples[i].alpha == par[k].samples[i].alpha);
    }
}

TEST_CASE("series against numerics: exact branch solution at omega = 0") {
    const auto poly = normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(0)}});
    const auto fams = find_balances(poly);
    const auto fam = *std::find_if(fams.begin(), fams.end(), [](const auto& f) { return f.consistent; });
    const Complex a(1.0, 1.0);
    const InitialPair ic{a, a / 2.0};
    const auto trs = integrate_batch({{kWidth0, ic, ComplexPath({1.0, 0.04}), opts(1e-12, 0.002)},
                                      {kWidth0, ic, ComplexPath({1.0, Complex(0.5, 0.5), Complex(0.0, 0.04)}), opts(1e-12, 0.002)}});
    const auto local = solve_local_series(poly, fam, a);
    const auto cmp = series_vs_numeric(local, 0.0, {0.05, 0.2}, trs);
    CHECK(cmp.points > 20);
    CHECK(cmp.max_relative_error < 1e-9);
    CHECK_THROWS_AS(series_vs_numeric(local, 0.0, {0.0, 0.2}, trs), std::invalid_argument);
}

TEST_CASE("series against numerics: omega = 1 converges with the order") {
    const auto poly = normalize(parse_ode("y'' + omega^2*y - y^-3"), {{"omega", GaussRational(1)}});
    const auto fams = find_balances(poly);
    const auto fam = *std::find_if(fams.begin(), fams.end(), [](const auto& f) { return f.consistent; });
    const double tstar = std::atanh(0.64);
    const auto trs = integrate_batch(
        {{kWidth1, {0.8, 0.0}, ComplexPath({0.0, Complex(0, tstar - 0.04)}), opts(1e-12, 0.002)},
         {kWidth1, {0.8, 0.0}, ComplexPath({0.0, 0.3, Complex(0.3, tstar), Complex(0.04, tstar)}), opts(1e-12, 0.002)}});
    const auto probe = detect_singularity(trs[0]);
    CHECK(std::abs(probe.t_star - Complex(0, tstar)) < 1e-3);
    std::vector<double> err;
    for (int K : {8, 12}) {
        LocalSolveOptions lo;
        lo.order = K;
        const auto local = solve_local_series(poly, fam, fam.leading_coeffs.front(), lo);
        const auto cmp = series_vs_numeric(local, probe.t_star, {0.05, 0.2}, trs, {true, true, true});
        CHECK(std::abs(cmp.t0 - Complex(0, tstar)) < 1e-8);
        err.push_back(cmp.max_relative_error);
    }
    CHECK(err[1] < err[0]);
    CHECK(err[1] < 1e-4);
}
