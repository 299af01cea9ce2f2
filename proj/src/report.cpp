#include "movsing/report.hpp"

#include <cmath>
#include <cstdio>

namespace movsing {

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0.0) return "0.0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

namespace {

void write(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                write(it.value(), out, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Short numeric tuples stay on one line.
            bool flat = j.size() <= 8;
            for (const auto& e : j) flat = flat && (e.is_number() || e.is_string() || e.is_boolean() || e.is_null());
            if (flat) {
                out += "[";
                for (size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    write(j[i], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write(j[i], out, depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

Json rational_json(const Rational& r) { return to_string(r); }

}  // namespace

std::string dump_json(const Json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const PuiseuxSeries<Complex>& s) {
    Json j;
    j["branch_order"] = s.branch_order();
    j["truncation"] = s.truncation() ? Json(*s.truncation()) : Json(nullptr);
    Json terms = Json::array();
    for (int k = s.start(); k <= s.end_index(); ++k) {
        const Complex c = s.coeff(k);
        if (c == Complex(0.0, 0.0)) continue;
        terms.push_back(Json::array({k, c.real(), c.imag()}));
    }
    j["terms"] = terms;
    return j;
}

Json to_json(const PuiseuxSeries<GaussRational>& s) {
    Json j;
    j["branch_order"] = s.branch_order();
    j["truncation"] = s.truncation() ? Json(*s.truncation()) : Json(nullptr);
    Json terms = Json::array();
    for (int k = s.start(); k <= s.end_index(); ++k) {
        const GaussRational c = s.coeff(k);
        if (c.is_zero()) continue;
        terms.push_back(Json::array({k, to_string(c.real()), to_string(c.imag())}));
    }
    j["terms"] = terms;
    return j;
}

Json to_json(const DifferentialPolynomial& poly) {
    Json j;
    j["text"] = poly.str();
    j["clearing_multiplier"] = poly.clearing_multiplier();
    j["order"] = poly.order();
    Json monos = Json::array();
    for (const auto& m : poly.monomials()) {
        Json mj;
        mj["term"] = DifferentialPolynomial({DiffMonomial{GaussRational(1), m.degrees}}, 0).str();
        mj["coeff"] = m.coeff.str();
        Json deg = Json::object();
        for (const auto& [k, d] : m.degrees) deg[std::to_string(k)] = d;
        mj["degrees"] = deg;
        mj["total_degree"] = m.total_degree();
        monos.push_back(mj);
    }
    j["monomials"] = monos;
    return j;
}

std::string family_kind(const BalanceFamily& fam) {
    if (fam.branch_order > 1) return "algebraic_branch_point";
    return fam.p < 0 ? "pole" : "zero";
}

Json to_json(const BalanceFamily& fam, const DifferentialPolynomial& poly) {
    Json j;
    j["p"] = rational_json(fam.p);
    j["branch_order"] = fam.branch_order;
    j["kind"] = family_kind(fam);
    j["q"] = rational_json(fam.q);
    j["q_uncleared"] = rational_json(fam.q_uncleared);
    Json dom = Json::array();
    Json dom_terms = Json::array();
    for (size_t i : fam.dominant_monomials) {
        dom.push_back(i);
        dom_terms.push_back(DifferentialPolynomial({poly.monomials().at(i)}, 0).str());
    }
    j["dominant_monomials"] = dom;
    j["dominant_terms"] = dom_terms;
    j["singleton_dominant"] = fam.singleton_dominant;
    j["leading_equation"] = to_string(fam.leading_equation);
    Json roots = Json::array();
    Json exact = Json::array();
    double worst = 0.0;
    for (size_t i = 0; i < fam.leading_coeffs.size(); ++i) {
        roots.push_back(to_json(fam.leading_coeffs[i]));
        exact.push_back(fam.exact_leading[i] ? Json(fam.exact_leading[i]->str()) : Json(nullptr));
        worst = std::max(worst, std::abs(evaluate(fam.leading_equation, fam.leading_coeffs[i])));
    }
    j["leading_coefficients"] = roots;
    j["leading_coefficients_exact"] = exact;
    j["leading_equation_max_residual"] = worst;
    j["consistent"] = fam.consistent;
    Json res = Json::array();
    for (const auto& r : fam.resonances) {
        Json rj;
        rj["value"] = to_json(r.value);
        rj["exact"] = r.exact ? Json(to_string(*r.exact)) : Json(nullptr);
        res.push_back(rj);
    }
    j["resonances"] = res;
    j["note"] = fam.note;
    return j;
}

Json to_json(const LocalSolution& sol) {
    Json j;
    j["family_p"] = rational_json(sol.family.p);
    j["branch_order"] = sol.branch_order();
    j["leading"] = to_json(sol.leading);
    j["leading_exact"] = sol.exact_leading ? Json(sol.exact_leading->str()) : Json(nullptr);
    j["order"] = sol.order;
    j["exact"] = sol.exact;
    j["forced"] = sol.forced;
    j["series"] = to_json(sol.series);
    if (sol.exact_series) j["series_exact"] = to_json(*sol.exact_series);
    Json fp = Json::array();
    for (const auto& [r, v] : sol.free_parameters) fp.push_back({{"resonance", to_string(r)}, {"value", to_json(v)}});
    j["free_parameters"] = fp;
    Json compat = Json::array();
    for (const auto& c : sol.compatibility)
        compat.push_back({{"order", c.order},
                          {"resonance", to_string(c.resonance)},
                          {"satisfied", c.satisfied},
                          {"defect", c.defect}});
    j["compatibility"] = compat;
    Json res = Json::array();
    for (int k = 0; k <= sol.order; ++k) {
        const int idx = sol.residual_start + k;
        if (sol.residual.truncation() && *sol.residual.truncation() < idx) break;
        res.push_back(Json::array({k, std::abs(sol.residual.coeff(idx))}));
    }
    j["residual_start"] = sol.residual_start;
    j["residual_by_order"] = res;
    j["residual_norm"] = sol.residual_norm;
    return j;
}

Json to_json(const ClosedFormCandidate& c) {
    Json j;
    j["kind"] = to_string(c.kind);
    Json pole = Json::array();
    for (const auto& x : c.pole_part) pole.push_back(to_json(x));
    j["pole_part"] = pole;
    if (c.kind == CandidateKind::SimplyPeriodic) {
        j["period"] = to_json(c.period);
        j["L"] = to_json(c.L);
        j["L_exact"] = c.exact_L ? Json(c.exact_L->str()) : Json(nullptr);
        j["h0"] = to_json(c.h0);
        Json m = Json::array();
        for (const auto& mc : c.matching)
            m.push_back({{"index", mc.index},
                         {"candidate", to_json(mc.candidate)},
                         {"local", to_json(mc.local)},
                         {"agrees", mc.agrees}});
        j["matching_checks"] = m;
    } else {
        Json t = Json::array();
        for (const auto& x : c.tail) t.push_back(to_json(x));
        j["tail"] = t;
    }
    j["exact"] = c.exact();
    j["residual_norm"] = c.residual_norm;
    j["verified"] = c.verified;
    j["verified_through_order"] = c.verified_through;
    j["first_failing_order"] = c.first_failing_order ? Json(*c.first_failing_order) : Json(nullptr);
    return j;
}

Json to_json(const QuarticPeriodCheck& q) {
    Json j;
    j["principal"] = to_json(q.principal);
    Json b = Json::array();
    for (const auto& x : q.branches) b.push_back(to_json(x));
    j["branches"] = b;
    j["matched_period"] = q.matched ? to_json(*q.matched) : Json(nullptr);
    j["principal_consistent"] = q.principal_consistent;
    j["any_branch_consistent"] = q.any_branch_consistent;
    j["modulus_consistent"] = q.modulus_consistent;
    j["sign_corrected"] = to_json(q.corrected);
    j["sign_corrected_consistent"] = q.corrected_consistent;
    return j;
}

Json to_json(const CoefficientComparison& row) {
    Json j;
    j["name"] = row.name;
    j["claimed"] = to_json(row.claimed);
    j["computed"] = row.computed ? to_json(*row.computed) : Json(nullptr);
    j["match"] = row.match;
    j["note"] = row.note;
    return j;
}

Json to_json(const ComplexTrajectory& traj, bool with_samples) {
    Json j;
    j["ode"] = to_string(traj.ode.kind);
    j["omega"] = to_json(traj.ode.omega);
    j["method"] = traj.method;
    j["tol"] = traj.tol;
    j["accepted_steps"] = traj.accepted;
    j["rejected_steps"] = traj.rejected;
    j["halted"] = traj.halted;
    j["halt_reason"] = traj.halt_reason;
    j["sample_count"] = traj.samples.size();
    if (!traj.samples.empty()) {
        const auto& e = traj.samples.back();
        j["end"] = Json::array({e.t.real(), e.t.imag(), e.alpha.real(), e.alpha.imag(), e.dalpha.real(), e.dalpha.imag()});
    }
    if (with_samples) {
        Json s = Json::array();
        for (const auto& x : traj.samples)
            s.push_back(Json::array({x.t.real(), x.t.imag(), x.alpha.real(), x.alpha.imag(), x.dalpha.real(), x.dalpha.imag()}));
        j["samples"] = s;
    }
    return j;
}

Json to_json(const SingularityProbe& p) {
    Json j;
    j["kind"] = to_string(p.kind);
    j["t_star"] = p.kind == SingularityKind::None ? Json(nullptr) : to_json(p.t_star);
    j["newton_estimate"] = p.kind == SingularityKind::None ? Json(nullptr) : to_json(p.newton_estimate);
    j["fit_samples"] = p.fit_samples;
    j["note"] = p.note;
    return j;
}

Json to_json(const ExponentFit& f) {
    Json j;
    j["resolved"] = f.resolved;
    j["nu"] = f.resolved ? Json(f.nu) : Json(nullptr);
    j["ci_half_width"] = f.resolved ? Json(f.ci_half_width) : Json(nullptr);
    j["r2"] = f.r2;
    j["window"] = Json::array({f.d_lo, f.d_hi});
    j["samples"] = f.samples;
    j["note"] = f.note;
    return j;
}

Json to_json(const ConstraintVerdict& v) {
    Json j;
    j["ac_minus_b2"] = to_json(v.ac_minus_b2);
    j["b2_minus_ac"] = to_json(v.b2_minus_ac);
    j["target_inverse_w2"] = to_json(v.target);
    j["ac_convention_holds"] = v.ac_convention;
    j["b2_convention_holds"] = v.b2_convention;
    j["verdict"] = v.label;
    return j;
}

}  // namespace movsing
