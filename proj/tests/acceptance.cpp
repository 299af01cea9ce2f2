// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "movsing/cli.hpp"
#include "movsing/pipeline.hpp"

using namespace movsing;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

DifferentialPolynomial width(long long w) {
    return normalize(parse_ode(kWidthEquation), {{"omega", GaussRational(w)}});
}

const BalanceFamily* family(const std::vector<BalanceFamily>& fams, Rational p) {
    for (const auto& f : fams)
        if (f.p == p) return &f;
    return nullptr;
}

std::vector<Rational> exact_set(const BalanceFamily& f) {
    std::vector<Rational> out;
    for (const auto& r : f.resonances) {
        if (!r.exact) return {};
        out.push_back(*r.exact);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Pole family expansion about the leading root closest to `near`.
LocalSolution pole_local(const DifferentialPolynomial& poly, int order, Complex near = 1.0) {
    const auto fams = find_balances(poly);
    const BalanceFamily* f = family(fams, Rational(-1));
    Complex a = f->leading_coeffs.front();
    for (Complex r : f->leading_coeffs)
        if (std::abs(r - near) < std::abs(a - near)) a = r;
    LocalSolveOptions lo;
    lo.order = order;
    return solve_local_series(poly, *f, a, lo);
}

void balance() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fams = find_balances(width(1));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int consistent = 0;
    bool shape = false;
    double worst = 0.0;
    for (const auto& f : fams) {
        if (!f.consistent) continue;
        ++consistent;
        shape = f.p == Rational(1, 2) && f.branch_order == 2 && f.leading_coeffs.size() == 4;
        for (Complex a : f.leading_coeffs) worst = std::max(worst, std::abs(std::pow(a, 4) + 4.0));
    }
    const BalanceFamily* claimed = family(fams, Rational(-1));
    const bool claimed_ok = claimed && !claimed->consistent && claimed->leading_coeffs.empty() &&
                            to_string(claimed->leading_equation) == "2*a^4 = 0";
    report(1, consistent == 1 && shape && worst < 1e-10 && claimed_ok && secs < 1.0,
           "one consistent family p = 1/2, n = 2, max |a^4 + 4| = " + fmt("%.2e", worst) +
               "; p = -1 inconsistent with leading equation " +
               (claimed ? to_string(claimed->leading_equation) : std::string("<missing>")) + "; " +
               fmt("%.3f s", secs));
}

void resonances() {
    const auto fams = find_balances(width(1));
    const auto* branch = family(fams, Rational(1, 2));
    const auto quartic = normalize(parse_ode("y'' - 2*y^3"), {});
    const auto qfams = find_balances(quartic);
    const auto* pole = family(qfams, Rational(-1));
    const bool a = branch && exact_set(*branch) == std::vector<Rational>{-1, 1};
    const bool b = pole && pole->consistent && exact_set(*pole) == std::vector<Rational>{-1, 4};
    report(2, a && b, std::string("width branch family {-1, 1} ") + (a ? "exact" : "wrong") +
                          "; w'' - 2w^3 {-1, 4} " + (b ? "exact" : "wrong"));
}

void cot() {
    const auto c = cot_laurent(7);
    const bool ok = c.coeff(-1) == GaussRational(1) && c.coeff(1) == GaussRational(Rational(-1, 3)) &&
                    c.coeff(3) == GaussRational(Rational(-1, 45)) && c.coeff(5) == GaussRational(Rational(-2, 945)) &&
                    c.coeff(7) == GaussRational(Rational(-1, 4725));
    report(3, ok, "cot coefficients " + c.coeff(-1).str() + ", " + c.coeff(1).str() + ", " + c.coeff(3).str() + ", " +
                      c.coeff(5).str() + ", " + c.coeff(7).str());
}

void reconstruction() {
    const auto riccati = normalize(parse_ode("y' + 1 + y^2"), {});
    auto per = build_periodic(pole_local(riccati, 10));
    verify_candidate(per, riccati, 10);
    const bool p_ok = std::abs(per.period - kPi) < 1e-14 && per.exact_h0 && per.exact_h0->is_zero() && per.verified &&
                      per.residual_norm == 0.0 && per.verified_through == 10;

    const auto quartic = normalize(parse_ode("y'' - 2*y^3"), {});
    const auto rat = build_rational(pole_local(quartic, 10), 2);
    bool tail_zero = true;
    for (Complex c : rat.tail) tail_zero = tail_zero && c == Complex(0.0, 0.0);
    const bool r_ok = rat.verified && rat.residual_norm == 0.0 && rat.pole_order() == 1 &&
                      std::abs(rat.pole_part[0] - 1.0) < 1e-15 && tail_zero;
    report(4, p_ok && r_ok,
           "cot equation T = " + fmt("%.15f", per.period.real()) + ", residual " + fmt("%g", per.residual_norm) +
               " through order 10; w'' - 2w^3 gives w = 1/tau with residual " + fmt("%g", rat.residual_norm));
}

void period_formula() {
    const auto riccati = normalize(parse_ode("y' + 1 + y^2"), {});
    const auto local = pole_local(riccati, 10);
    auto per = build_periodic(local);
    const auto q = quartic_period_formula(local, per.period);
    // Hand computation: c_{-1} = 1, c_3 = -1/45, so (c_{-1}/45)^(1/4) c_3^(-1/4) = (-1)^(-1/4).
    const Complex hand = kPi * std::polar(1.0, -kPi / 4);
    const bool hand_consistent = std::abs(hand - kPi) < 1e-9 || std::abs(hand + kPi) < 1e-9;
    const bool cot_ok = std::abs(q.principal - hand) < 1e-12 && q.principal_consistent == hand_consistent;

    const Json rep = full_report(load_ode(std::nullopt, {}), {});
    const Json& cl = rep["closed_form"]["claimed_laurent"];
    const double residual = cl["candidate"]["residual_norm"].get<double>();
    std::string status, verdict;
    for (const auto& c : rep["claims"])
        if (c["id"] == "meromorphic_solution") {
            status = c["status"].get<std::string>();
            verdict = c["evidence"]["verdict"].get<std::string>();
        }
    const bool ep_ok = residual > 0.0 && status == "refuted" && verdict == "refuted at order ≤ 10";
    report(5, cot_ok && ep_ok,
           "formula value " + fmt("%.6f", q.principal.real()) + fmt("%+.6fi", q.principal.imag()) +
               " vs matched T = pi, consistent = " + (q.principal_consistent ? "true" : "false") +
               "; claimed-data candidate residual " + fmt("%g", residual) + ", ledger: " + status + " (" + verdict + ")");
}

void pinney() {
    ExactRequest req;
    req.which = "pinney";
    const Json j = exact_section(req)["pinney"];
    const double diff = j["numeric"]["max_abs_difference"].get<double>();
    const bool ac = j["constraint"]["ac_convention_holds"].get<bool>();
    const bool b2 = j["constraint"]["b2_convention_holds"].get<bool>();
    report(6, diff < 1e-6 && ac && !b2,
           "max |alpha_superposition - alpha_numeric| on [0, 5] = " + fmt("%.2e", diff) + "; verdict " +
               j["constraint"]["verdict"].get<std::string>() + " (B^2 - AC sign flagged)");
}

void invariant() {
    ExactRequest req;
    req.which = "invariant";
    const Json j = exact_section(req)["invariant"];
    const auto& rows = j["by_tolerance"];
    const double d8 = rows[0]["max_drift"].get<double>(), d10 = rows[1]["max_drift"].get<double>(),
                 d12 = rows[2]["max_drift"].get<double>();
    report(7, d10 < 1e-8 && j["monotone"].get<bool>(),
           "drift " + fmt("%.2e", d8) + " / " + fmt("%.2e", d10) + " / " + fmt("%.2e", d12) +
               " at tol 1e-8 / 1e-10 / 1e-12");
}

void branch_probe() {
    NumericRequest req;
    req.omega = 0.0;
    req.ic = {1.0, 0.0};
    req.path = "0:0.999i";
    req.tol = 1e-12;
    const Json j = probe_section(req);
    const auto& run = j["runs"][0];
    const Complex t(run["singularity"]["t_star"][0].get<double>(), run["singularity"]["t_star"][1].get<double>());
    const bool resolved = !run["exponent"].is_null() && run["exponent"]["resolved"].get<bool>();
    const double nu = resolved ? run["exponent"]["nu"].get<double>() : NAN;
    const bool axis = j["confinement"]["on_imaginary_axis"].get<bool>() && j["confinement"]["conjugate_pair"].get<bool>();
    report(8, std::abs(t - Complex(0, 1)) < 1e-3 && resolved && std::abs(nu - 0.5) <= 0.02 && axis,
           "|t_star - i| = " + fmt("%.2e", std::abs(t - Complex(0, 1))) + ", nu = " + fmt("%.5f", nu) +
               ", singularities at +-i on the imaginary axis: " + (axis ? "yes" : "no"));
}

void riccati() {
    ExactRequest req;
    req.which = "riccati";
    const double exact_max = exact_section(req)["riccati"]["max_residual"].get<double>();
    // Initial-value superposition and the superposition used in criterion 6.
    double worst = exact_max;
    const auto cruz = cruz_solution(1.0, 0.5, oscillator_basis(1.0), 1);
    for (double t = 0.0; t <= 5.0; t += 0.01)
        worst = std::max(worst, std::abs(riccati_residual(cruz.solution.value(t), cruz.solution.derivative(t),
                                                          cruz.solution.second_derivative(t), 1.0)));
    report(9, worst < 1e-6, "max |Y' + Y^2 + w^2| over exact width solutions = " + fmt("%.2e", worst));
}

void series_engine() {
    using Q = PuiseuxSeries<GaussRational>;
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7), start(-3, 3), len(0, 6), br(1, 3);
    const auto rnd = [&] {
        std::vector<GaussRational> c;
        for (int i = len(rng); i > 0; --i)
            c.push_back(GaussRational(Rational(num(rng), den(rng)), Rational(num(rng), den(rng))));
        return Q::from_coefficients(start(rng), std::move(c), br(rng));
    };
    int passed = 0;
    for (int i = 0; i < 1000; ++i) {
        const Q a = rnd(), b = rnd(), c = rnd();
        passed += a + b == b + a && a * b == b * a && (a * b) * c == a * (b * c) && a * (b + c) == a * b + a * c;
    }
    const auto poly = width(1);
    const auto fams = find_balances(poly);
    const auto* f = family(fams, Rational(1, 2));
    double worst = 0.0;
    for (Complex a : f->leading_coeffs) {
        LocalSolveOptions lo;
        lo.order = 12;
        worst = std::max(worst, solve_local_series(poly, *f, a, lo).residual_norm);
    }
    const Json an = analyze_section(load_ode(std::nullopt, {}), {});
    bool table = an.contains("coefficient_comparison") && !an["coefficient_comparison"]["rows"].empty();
    if (table)
        for (const auto& r : an["coefficient_comparison"]["rows"]) table = table && r["match"].is_boolean();
    report(10, passed == 1000 && worst < 1e-12 && table,
           std::to_string(passed) + "/1000 ring-law cases exact; K = 12 residual " + fmt("%.2e", worst) +
               "; comparison table " + (table ? "emitted with match flags" : "missing"));
}

void determinism() {
    std::ostringstream a, b, e;
    const int ca = run_cli({"analyze"}, a, e);
    const int cb = run_cli({"analyze"}, b, e);
    report(11, ca == 0 && cb == 0 && a.str() == b.str() && !a.str().empty(),
           "two analyze runs: " + std::to_string(a.str().size()) + " bytes, " +
               (a.str() == b.str() ? "identical" : "different"));
}

}  // namespace

int main() {
    balance();
    resonances();
    cot();
    reconstruction();
    period_formula();
    pinney();
    invariant();
    branch_probe();
    riccati();
    series_engine();
    determinism();
    std::printf("%d of 11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
