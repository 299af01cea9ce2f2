#include "movsing/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "movsing/pipeline.hpp"

namespace movsing {

namespace {

struct CommonFlags {
    std::optional<std::string> ode;
    std::vector<std::string> params;
    int order = kDefaultSeriesOrder;
    int branch_max = 4;
    std::string format = "json";
    std::string out;
    std::string residue_scale = "1";
};

struct NumericFlags {
    std::string ode_kind = "ep";
    std::string omega;
    std::string ic;
    std::string path;
    double tol = 0.0;
    std::optional<double> spacing;
    bool no_samples = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--ode", f.ode, "ODE text or @file (default: the width equation)");
    sub->add_option("--param", f.params, "parameter binding name=value (repeatable)");
    sub->add_option("--order", f.order, "series order K")->check(CLI::Range(0, 60));
    sub->add_option("--branch-max", f.branch_max, "largest branch order n")->check(CLI::Range(1, 12));
    sub->add_option("--format", f.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", f.out, "write the report to this file");
}

void add_numeric(CLI::App* sub, NumericFlags& f) {
    sub->add_option("--ode-kind", f.ode_kind, "ep or linear")->check(CLI::IsMember({"ep", "linear"}));
    sub->add_option("--omega", f.omega, "frequency (complex literal)");
    sub->add_option("--ic", f.ic, "initial value,derivative");
    sub->add_option("--path", f.path, "waypoints a:b[:c...]");
    sub->add_option("--tol", f.tol, "integrator tolerance")->check(CLI::Range(1e-13, 1e-6));
    sub->add_option("--spacing", f.spacing, "arc-length sample spacing")->check(CLI::PositiveNumber);
}

Complex complex_arg(const std::string& text, const char* what) {
    auto z = parse_complex(text);
    if (!z) throw InputError(std::string("bad ") + what + " '" + text + "'");
    return *z;
}

InitialPair ic_arg(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InputError("--ic expects value,derivative");
    return {complex_arg(text.substr(0, comma), "initial value"), complex_arg(text.substr(comma + 1), "initial derivative")};
}

Rational rational_arg(const std::string& text, const char* what) {
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        const Rational r = rational_arg(text.substr(1), what);
        return text.front() == '-' ? Rational(-r) : r;
    }
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        auto num = parse_decimal(text.substr(0, slash));
        auto den = parse_decimal(text.substr(slash + 1));
        if (!num || !den || *den == 0) throw InputError(std::string("bad ") + what + " '" + text + "'");
        return *num / *den;
    }
    auto r = parse_decimal(text);
    if (!r) throw InputError(std::string("bad ") + what + " '" + text + "'");
    return *r;
}

NumericRequest numeric_request(const NumericFlags& f, NumericRequest base) {
    base.kind = f.ode_kind == "linear" ? OdeKind::LinearOscillator : OdeKind::ErmakovPinney;
    if (!f.omega.empty()) base.omega = complex_arg(f.omega, "omega");
    if (!f.ic.empty()) base.ic = ic_arg(f.ic);
    if (!f.path.empty()) base.path = f.path;
    if (f.tol > 0.0) base.tol = f.tol;
    if (f.spacing) base.spacing = f.spacing;
    base.with_samples = !f.no_samples;
    return base;
}

AnalysisOptions analysis_options(const CommonFlags& f) {
    AnalysisOptions o;
    o.order = f.order;
    o.branch_max = f.branch_max;
    o.residue_scale = rational_arg(f.residue_scale, "residue scale");
    return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Movable-singularity analysis of autonomous polynomial ODEs", "movsing"};
    app.require_subcommand(1);

    CommonFlags common;
    NumericFlags numeric;

    auto* analyze = app.add_subcommand("analyze", "balances, resonances and local series");
    add_common(analyze, common);
    analyze->add_option("--residue-scale", common.residue_scale, "c in the claimed residue c*i");

    SeriesRequest sreq;
    std::string family, leading;
    std::vector<std::string> free_values;
    auto* series = app.add_subcommand("series", "local series of one family");
    add_common(series, common);
    series->add_option("--family", family, "exponent p of the family (e.g. 1/2)");
    series->add_option("--root", sreq.root, "index of the leading root");
    series->add_option("--leading", leading, "leading coefficient for forced families");
    series->add_option("--free", free_values, "free value at a resonance, r=value (repeatable)");
    series->add_flag("--force", sreq.force, "expand an inconsistent family");

    auto* closed = app.add_subcommand("closed-form", "periodic and rational candidates");
    add_common(closed, common);
    closed->add_option("--residue-scale", common.residue_scale, "c in the claimed residue c*i");

    auto* integ = app.add_subcommand("integrate", "integrate along a complex path");
    add_common(integ, common);
    add_numeric(integ, numeric);
    integ->add_flag("--no-samples", numeric.no_samples, "omit the sample array");

    auto* probe = app.add_subcommand("probe", "locate singularities and fit the local exponent");
    add_common(probe, common);
    add_numeric(probe, numeric);

    ExactRequest ereq;
    std::string A, B, C, alpha0, dalpha0;
    auto* exact = app.add_subcommand("verify-exact", "closed-form identities");
    add_common(exact, common);
    exact->add_option("--case", ereq.which, "pinney|cruz|riccati|invariant|mobius|third-order|oscillator|all");
    exact->add_option("--A", A);
    exact->add_option("--B", B);
    exact->add_option("--C", C);
    exact->add_option("--omega", numeric.omega, "frequency");
    exact->add_option("--alpha0", alpha0, "initial width");
    exact->add_option("--dalpha0", dalpha0, "initial width derivative");
    exact->add_option("--t-end", ereq.t_end, "end of the real check interval")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "full pipeline with the claims ledger");
    add_common(report, common);
    report->add_option("--residue-scale", common.residue_scale, "c in the claimed residue c*i");

    std::ostringstream cli_out, cli_err;
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? 0 : 2;
    }

    try {
        const OdeInput in = load_ode(common.ode, parse_param_bindings(common.params));
        const AnalysisOptions opts = analysis_options(common);
        Json body;
        std::string command;
        if (*analyze) {
            command = "analyze";
            body = analyze_section(in, opts);
        } else if (*series) {
            command = "series";
            if (!family.empty()) sreq.family = rational_arg(family, "family exponent");
            if (!leading.empty()) sreq.leading = complex_arg(leading, "leading coefficient");
            for (const auto& fv : free_values) {
                const auto eq = fv.find('=');
                if (eq == std::string::npos) throw InputError("--free expects r=value");
                sreq.free_values[rational_arg(fv.substr(0, eq), "resonance")] = complex_arg(fv.substr(eq + 1), "free value");
            }
            body = series_section(in, opts, sreq);
        } else if (*closed) {
            command = "closed-form";
            body = closed_form_section(in, opts);
        } else if (*integ) {
            command = "integrate";
            body = integrate_section(numeric_request(numeric, {}));
        } else if (*probe) {
            command = "probe";
            NumericRequest base;
            base.omega = 0.0;
            base.path = "0:0.999i";
            base.tol = 1e-12;
            body = probe_section(numeric_request(numeric, base));
        } else if (*exact) {
            command = "verify-exact";
            if (!numeric.omega.empty()) ereq.omega = complex_arg(numeric.omega, "omega");
            if (!A.empty()) ereq.quad.A = complex_arg(A, "A");
            if (!B.empty()) ereq.quad.B = complex_arg(B, "B");
            if (!C.empty()) ereq.quad.C = complex_arg(C, "C");
            if (!alpha0.empty()) ereq.alpha0.value = ereq.cruz_ic.value = complex_arg(alpha0, "alpha0");
            if (!dalpha0.empty()) ereq.alpha0.derivative = ereq.cruz_ic.derivative = complex_arg(dalpha0, "dalpha0");
            body = exact_section(ereq);
        } else {
            command = "report";
            body = full_report(in, opts);
        }

        Json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = command;
        for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
        const std::string text = common.format == "text" ? text_summary(doc) : dump_json(doc);
        if (common.out.empty()) {
            out << text;
        } else {
            std::ofstream f(common.out);
            if (!f) throw InputError("cannot write '" + common.out + "'");
            f << text;
        }
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateFamilyError& e) {
        err << "internal inconsistency: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal inconsistency: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace movsing
