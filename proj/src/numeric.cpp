#include "movsing/numeric.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace movsing {

ComplexPath::ComplexPath(std::vector<Complex> waypoints) : waypoints_(std::move(waypoints)) {
    if (waypoints_.size() < 2) throw std::invalid_argument("a path needs at least two waypoints");
    cumulative_.push_back(0.0);
    for (size_t i = 1; i < waypoints_.size(); ++i) {
        const double len = std::abs(waypoints_[i] - waypoints_[i - 1]);
        if (len == 0.0) throw std::invalid_argument("consecutive path waypoints must differ");
        cumulative_.push_back(cumulative_.back() + len);
    }
}

Complex ComplexPath::point_at(double s) const {
    if (s <= 0.0) return waypoints_.front();
    if (s >= length()) return waypoints_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const size_t seg = static_cast<size_t>(it - cumulative_.begin()) - 1;
    const Complex a = waypoints_[seg];
    const Complex b = waypoints_[seg + 1];
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    return a + (b - a) * ((s - cumulative_[seg]) / len);
}

ComplexPath ComplexPath::parse(const std::string& text) {
    std::vector<Complex> points;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        auto z = parse_complex(item);
        if (!z) throw std::invalid_argument("bad path point '" + item + "'");
        points.push_back(*z);
    }
    return ComplexPath(std::move(points));
}

const char* to_string(OdeKind kind) {
    return kind == OdeKind::ErmakovPinney ? "ermakov_pinney" : "linear_oscillator";
}

const char* to_string(SingularityKind kind) {
    return kind == SingularityKind::ZeroOfAlpha ? "zero_of_alpha" : "none";
}

namespace {

using State = std::array<Complex, 2>;

State rhs(const OdeSpec& ode, const State& y, Complex dir) {
    const Complex w2 = ode.omega * ode.omega;
    Complex acc = -w2 * y[0];
    if (ode.kind == OdeKind::ErmakovPinney) acc += 1.0 / (y[0] * y[0] * y[0]);
    return {dir * y[1], dir * acc};
}

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms) {
        out[0] += h * c * (*k)[0];
        out[1] += h * c * (*k)[1];
    }
    return out;
}

}  // namespace

ComplexTrajectory integrate(const OdeSpec& ode, InitialPair ic, const ComplexPath& path,
                            const IntegrateOptions& options) {
    const double tol = options.tol;
    if (!(tol >= 1e-13 && tol <= 1e-6)) throw std::invalid_argument("tol must lie in [1e-13, 1e-6]");
    if (ode.kind == OdeKind::ErmakovPinney && ic.value == Complex(0.0, 0.0))
        throw std::invalid_argument("initial alpha must be nonzero");
    if (options.sample_spacing && !(*options.sample_spacing > 0.0))
        throw std::invalid_argument("sample spacing must be positive");

    ComplexTrajectory traj;
    traj.ode = ode;
    traj.tol = tol;
    const double halt_level = 10.0 * std::sqrt(tol);
    State y{ic.value, ic.derivative};
    traj.samples.push_back({path.waypoints().front(), y[0], y[1], 0.0});

    const auto& pts = path.waypoints();
    const auto& cum = path.cumulative();
    const double total = path.length();
    double h = std::min(1e-2, total);
    long steps = 0;
    long next_grid = 1;

    for (size_t seg = 0; seg + 1 < pts.size() && !traj.halted; ++seg) {
        const Complex a = pts[seg];
        const double len = cum[seg + 1] - cum[seg];
        const Complex dir = (pts[seg + 1] - a) / len;
        double s = 0.0;
        State k1 = rhs(ode, y, dir);
        while (s < len) {
            if (++steps > options.max_steps) {
                traj.halted = true;
                traj.halt_reason = "maximum step count reached";
                break;
            }
            bool to_grid = false;
            double step = std::min(h, len - s);
            bool to_end = step == len - s;
            if (options.sample_spacing) {
                const double g = static_cast<double>(next_grid) * *options.sample_spacing - cum[seg];
                if (g <= s + 1e-12 * std::max(1.0, total)) {
                    ++next_grid;
                    continue;
                }
                if (g - s <= step) {
                    step = g - s;
                    to_grid = true;
                    to_end = false;
                    if (std::abs(g - len) <= 1e-12 * std::max(1.0, total)) {
                        step = len - s;
                        to_end = true;
                    }
                }
            }

            const State k2 = rhs(ode, axpy(y, step, {{1.0 / 5, &k1}}), dir);
            const State k3 = rhs(ode, axpy(y, step, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}), dir);
            const State k4 = rhs(ode, axpy(y, step, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}), dir);
            const State k5 = rhs(ode,
                                 axpy(y, step,
                                      {{19372.0 / 6561, &k1},
                                       {-25360.0 / 2187, &k2},
                                       {64448.0 / 6561, &k3},
                                       {-212.0 / 729, &k4}}),
                                 dir);
            const State k6 = rhs(ode,
                                 axpy(y, step,
                                      {{9017.0 / 3168, &k1},
                                       {-355.0 / 33, &k2},
                                       {46732.0 / 5247, &k3},
                                       {49.0 / 176, &k4},
                                       {-5103.0 / 18656, &k5}}),
                                 dir);
            const State y_new = axpy(y, step,
                                     {{35.0 / 384, &k1},
                                      {500.0 / 1113, &k3},
                                      {125.0 / 192, &k4},
                                      {-2187.0 / 6784, &k5},
                                      {11.0 / 84, &k6}});
            const State k7 = rhs(ode, y_new, dir);
            const State e = axpy(State{0.0, 0.0}, step,
                                 {{71.0 / 57600, &k1},
                                  {-71.0 / 16695, &k3},
                                  {71.0 / 1920, &k4},
                                  {-17253.0 / 339200, &k5},
                                  {22.0 / 525, &k6},
                                  {-1.0 / 40, &k7}});
            double err = 0.0;
            bool finite = true;
            for (int i = 0; i < 2; ++i) {
                const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y_new[i])));
                const double r = std::abs(e[i]) / sc;
                finite = finite && std::isfinite(r) && std::isfinite(std::abs(y_new[i]));
                err += r * r;
            }
            // Error per unit step.
            err = std::sqrt(err / 2.0) / step;

            if (finite && err <= 1.0) {
                s = to_end ? len : s + step;
                y = y_new;
                k1 = k7;
                ++traj.accepted;
                const double s_global = cum[seg] + s;
                const Complex t = to_end ? pts[seg + 1] : a + dir * s;
                const bool last = to_end && seg + 2 == pts.size();
                if (!options.sample_spacing || to_grid || last) {
                    traj.samples.push_back({t, y[0], y[1], s_global});
                    if (to_grid) ++next_grid;
                }
                if (ode.kind == OdeKind::ErmakovPinney && std::abs(y[0]) < halt_level) {
                    if (options.sample_spacing && !to_grid && !last)
                        traj.samples.push_back({t, y[0], y[1], s_global});
                    traj.halted = true;
                    traj.halt_reason = "approaching singular manifold: |alpha| < 10*sqrt(tol)";
                    break;
                }
                const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0);
                h = step * fac;
            } else {
                ++traj.rejected;
                const double fac = finite ? std::clamp(0.9 * std::pow(err, -0.25), 0.2, 0.9) : 0.25;
                h = step * fac;
                if (h < 1e-14 * std::max(1.0, total)) {
                    traj.halted = true;
                    traj.halt_reason = "step size underflow";
                    break;
                }
            }
        }
    }
    return traj;
}

std::vector<ComplexTrajectory> integrate_batch(const std::vector<IntegrationJob>& jobs, unsigned max_threads) {
    std::vector<ComplexTrajectory> out(jobs.size());
    if (jobs.empty()) return out;
    unsigned threads = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs.size());
    auto worker = [&]() {
        for (size_t i = next++; i < jobs.size(); i = next++) {
            try {
                out[i] = integrate(jobs[i].ode, jobs[i].ic, jobs[i].path, jobs[i].options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

// Solves the (small) complex linear system M x = b in place.
template <size_t N>
bool solve_linear(std::array<std::array<Complex, N>, N> M, std::array<Complex, N>& b, size_t n = N) {
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < n; ++r)
            if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
        if (std::abs(M[piv][c]) == 0.0) return false;
        std::swap(M[c], M[piv]);
        std::swap(b[c], b[piv]);
        for (size_t r = c + 1; r < n; ++r) {
            const Complex f = M[r][c] / M[c][c];
            for (size_t k = c; k < n; ++k) M[r][k] -= f * M[c][k];
            b[r] -= f * b[c];
        }
    }
    for (size_t c = n; c-- > 0;) {
        for (size_t k = c + 1; k < n; ++k) b[c] -= M[c][k] * b[k];
        b[c] /= M[c][c];
    }
    return true;
}

}  // namespace

SingularityProbe detect_singularity(const ComplexTrajectory& traj, int window) {
    SingularityProbe probe;
    if (traj.ode.kind == OdeKind::LinearOscillator) {
        probe.note = "linear equation: no movable singularities";
        return probe;
    }
    window = std::max(window, 4);
    const auto& S = traj.samples;
    if (static_cast<int>(S.size()) < window) {
        probe.note = "too few samples";
        return probe;
    }
    const size_t first = S.size() - static_cast<size_t>(window);
    for (size_t i = first + 1; i < S.size(); ++i) {
        if (!(std::abs(S[i].alpha) < std::abs(S[i - 1].alpha))) {
            probe.note = "|alpha| is not decreasing at the end of the trajectory";
            return probe;
        }
    }
    const Complex t_last = S.back().t;
    double span = 0.0;
    for (size_t i = first; i < S.size(); ++i) span = std::max(span, std::abs(S[i].t - t_last));
    if (span == 0.0) {
        probe.note = "degenerate fit window";
        return probe;
    }
    // Least squares for alpha^2 ~ c0 + c1 x + c2 x^2, x = (t - t_last)/span.
    std::array<std::array<Complex, 3>, 3> M{};
    std::array<Complex, 3> rhs_v{};
    for (size_t i = first; i < S.size(); ++i) {
        const Complex x = (S[i].t - t_last) / span;
        const std::array<Complex, 3> phi{1.0, x, x * x};
        const Complex target = S[i].alpha * S[i].alpha;
        for (size_t r = 0; r < 3; ++r) {
            for (size_t c = 0; c < 3; ++c) M[r][c] += std::conj(phi[r]) * phi[c];
            rhs_v[r] += std::conj(phi[r]) * target;
        }
    }
    if (!solve_linear(M, rhs_v)) {
        probe.note = "singular fit";
        return probe;
    }
    const Complex c0 = rhs_v[0], c1 = rhs_v[1], c2 = rhs_v[2];
    std::vector<Complex> roots;
    if (std::abs(c2) <= 1e-14 * (std::abs(c1) + std::abs(c0))) {
        if (c1 != Complex(0.0, 0.0)) roots.push_back(-c0 / c1);
    } else {
        const Complex disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
        // Numerically stable quadratic roots.
        const Complex qq = -0.5 * (c1 + (std::real(std::conj(c1) * disc) >= 0.0 ? disc : -disc));
        if (qq != Complex(0.0, 0.0)) {
            roots.push_back(qq / c2);
            roots.push_back(c0 / qq);
        }
    }
    if (roots.empty()) {
        probe.note = "fit has no zero";
        return probe;
    }
    Complex x = roots.front();
    for (const Complex& r : roots)
        if (std::abs(r) < std::abs(x)) x = r;
    probe.t_star = t_last + x * span;
    probe.fit_samples = window;
    const auto& end = S.back();
    if (end.dalpha == Complex(0.0, 0.0)) {
        probe.note = "zero slope at the end of the trajectory";
        return probe;
    }
    probe.newton_estimate = end.t - end.alpha / (2.0 * end.dalpha);
    const double dist = std::abs(probe.newton_estimate - end.t);
    if (std::abs(probe.t_star - probe.newton_estimate) > 0.25 * dist + 1e-12) {
        probe.note = "quadratic fit and Newton estimate disagree";
        return probe;
    }
    probe.kind = SingularityKind::ZeroOfAlpha;
    return probe;
}

ExponentFit fit_local_exponent(const ComplexTrajectory& traj, Complex t_star, std::optional<double> d_lo) {
    ExponentFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : traj.samples) {
        const double d = std::abs(s.t - t_star);
        const double a = std::abs(s.alpha);
        if (d > 0.0 && a > 0.0 && std::isfinite(a)) pts.emplace_back(d, a);
    }
    if (pts.empty()) {
        fit.note = "exponent unresolved: no usable samples";
        return fit;
    }
    double lo = d_lo.value_or(std::min_element(pts.begin(), pts.end())->first);
    fit.d_lo = lo;
    fit.d_hi = 10.0 * lo;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (const auto& [d, a] : pts) {
        if (d < lo * (1 - 1e-12) || d > fit.d_hi * (1 + 1e-12)) continue;
        const double x = std::log(d), y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    fit.samples = n;
    if (n < 8) {
        fit.note = "exponent unresolved: fewer than 8 samples in the fit window";
        return fit;
    }
    const double Sxx = sxx - sx * sx / n;
    const double Sxy = sxy - sx * sy / n;
    const double Syy = syy - sy * sy / n;
    if (Sxx <= 0.0) {
        fit.note = "exponent unresolved: distances do not vary";
        return fit;
    }
    fit.nu = Sxy / Sxx;
    const double ss_res = std::max(0.0, Syy - fit.nu * Sxy);
    fit.r2 = Syy > 0.0 ? 1.0 - ss_res / Syy : 1.0;
    fit.ci_half_width = 1.96 * std::sqrt(ss_res / (n - 2) / Sxx);
    fit.resolved = fit.r2 > 0.99;
    if (!fit.resolved) fit.note = "exponent unresolved: R^2 <= 0.99";
    return fit;
}

InvariantDrift invariant_drift(const ComplexTrajectory& eta, const ComplexTrajectory& alpha) {
    if (eta.samples.size() != alpha.samples.size()) throw std::invalid_argument("mismatched grids");
    InvariantDrift out;
    for (size_t i = 0; i < eta.samples.size(); ++i) {
        const auto& e = eta.samples[i];
        const auto& a = alpha.samples[i];
        if (std::abs(e.t - a.t) > 1e-9 * (1.0 + std::abs(e.t))) throw std::invalid_argument("mismatched grids");
        const Complex I = 0.5 * (std::pow(e.dalpha * a.alpha - e.alpha * a.dalpha, 2) +
                                 std::pow(e.alpha / a.alpha, 2));
        if (i == 0) out.initial = I;
        out.max_drift = std::max(out.max_drift, std::abs(I - out.initial));
        ++out.samples;
    }
    return out;
}

namespace {

struct RaySample {
    Complex t;
    Complex alpha;
    Complex dalpha;
    double theta;  // continuous arg(t - t0_ref)
};

LocalSolution resolve(const LocalSolution& base, Complex a, const std::map<Rational, Complex>& free) {
    LocalSolveOptions opts;
    opts.order = base.order;
    opts.free_values = free;
    opts.force = base.forced;
    opts.mode = ScalarMode::Float;
    return solve_local_series(base.equation, base.family, a, opts);
}

double ray_theta(const RaySample& s, Complex t0_ref, Complex t0) {
    return s.theta + std::arg((s.t - t0) / (s.t - t0_ref));
}

}  // namespace

SeriesComparison series_vs_numeric(const LocalSolution& local, Complex t0, Annulus annulus,
                                   const std::vector<ComplexTrajectory>& trajectories,
                                   const SeriesComparisonOptions& options) {
    if (!(annulus.r_in > 0.0)) throw std::invalid_argument("annulus inner radius must be positive");
    if (!(annulus.r_out > annulus.r_in)) throw std::invalid_argument("annulus outer radius must exceed the inner");

    std::vector<std::vector<RaySample>> rays;
    for (const auto& traj : trajectories) {
        std::vector<RaySample> ray;
        for (const auto& s : traj.samples) {
            const Complex tau = s.t - t0;
            const double r = std::abs(tau);
            if (r < annulus.r_in || r > annulus.r_out) continue;
            double theta = std::arg(tau);
            if (!ray.empty()) theta = ray.back().theta + std::arg(tau / (ray.back().t - t0));
            ray.push_back({s.t, s.alpha, s.dalpha, theta});
        }
        if (!ray.empty()) rays.push_back(std::move(ray));
    }
    if (rays.empty()) throw std::invalid_argument("no trajectory samples inside the annulus");

    // Innermost sample overall fixes the reference ray.
    size_t ref_ray = 0, ref_idx = 0;
    double best_r = std::numeric_limits<double>::max();
    for (size_t i = 0; i < rays.size(); ++i)
        for (size_t j = 0; j < rays[i].size(); ++j)
            if (std::abs(rays[i][j].t - t0) < best_r) {
                best_r = std::abs(rays[i][j].t - t0);
                ref_ray = i;
                ref_idx = j;
            }
    const RaySample ref = rays[ref_ray][ref_idx];
    const double p = to_double(local.family.p);

    Complex a = local.leading;
    if (options.choose_leading && !local.family.leading_coeffs.empty()) {
        const Complex unit = std::polar(std::pow(best_r, p), ref.theta * p);
        for (const Complex& cand : local.family.leading_coeffs)
            if (std::abs(cand * unit - ref.alpha) < std::abs(a * unit - ref.alpha)) a = cand;
    }

    SeriesComparison out;
    std::map<Rational, Complex> free = local.free_parameters;
    Complex t0_fit = t0;
    LocalSolution sol = (a == local.leading && !options.fit_free) ? local : resolve(local, a, free);

    std::vector<Rational> free_keys;
    if (options.fit_free)
        for (const auto& [r, v] : free)
            if (r > 0) free_keys.push_back(r);
    const size_t unknowns = (options.fit_t0 ? 1 : 0) + free_keys.size();
    if (unknowns > 2) throw std::invalid_argument("at most two quantities can be fitted");

    if (unknowns > 0) {
        auto pack = [&]() {
            std::vector<Complex> z;
            if (options.fit_t0) z.push_back(t0_fit);
            for (const auto& k : free_keys) z.push_back(free[k]);
            return z;
        };
        auto model = [&](const std::vector<Complex>& z, std::array<Complex, 2>& f) {
            size_t i = 0;
            Complex tz = t0_fit;
            if (options.fit_t0) tz = z[i++];
            std::map<Rational, Complex> fv = free;
            for (const auto& k : free_keys) fv[k] = z[i++];
            const LocalSolution s = free_keys.empty() ? sol : resolve(local, a, fv);
            const Complex tau = ref.t - tz;
            const double th = ray_theta(ref, t0, tz);
            f[0] = s.series.evaluate_polar(std::abs(tau), th) - ref.alpha;
            f[1] = series_differentiate(s.series, 1).evaluate_polar(std::abs(tau), th) - ref.dalpha;
        };
        std::vector<Complex> z = pack();
        for (int it = 0; it < 40; ++it) {
            std::array<Complex, 2> f{};
            model(z, f);
            std::array<std::array<Complex, 2>, 2> J{};
            for (size_t k = 0; k < unknowns; ++k) {
                std::vector<Complex> zk = z;
                const double h = 1e-7 * std::max(1.0, std::abs(z[k]));
                zk[k] += h;
                std::array<Complex, 2> fk{};
                model(zk, fk);
                for (size_t r = 0; r < 2; ++r) J[r][k] = (fk[r] - f[r]) / h;
            }
            std::array<Complex, 2> step{-f[0], -f[1]};
            if (!solve_linear(J, step, unknowns)) break;
            double norm = 0.0, scale = 1.0;
            for (size_t k = 0; k < unknowns; ++k) {
                z[k] += step[k];
                norm = std::max(norm, std::abs(step[k]));
                scale = std::max(scale, std::abs(z[k]));
            }
            out.newton_iterations = it + 1;
            if (norm <= 1e-13 * scale) break;
        }
        size_t i = 0;
        if (options.fit_t0) t0_fit = z[i++];
        for (const auto& k : free_keys) free[k] = z[i++];
        if (!free_keys.empty()) sol = resolve(local, a, free);
    }

    const int n = sol.branch_order();
    double worst = 0.0;
    int count = 0;
    for (size_t ri = 0; ri < rays.size(); ++ri) {
        const auto& ray = rays[ri];
        // Branch offset 2*pi*m that matches this ray's innermost sample.
        size_t inner = 0;
        for (size_t j = 1; j < ray.size(); ++j)
            if (std::abs(ray[j].t - t0_fit) < std::abs(ray[inner].t - t0_fit)) inner = j;
        double offset = 0.0;
        if (ri != ref_ray) {
            double best = std::numeric_limits<double>::max();
            for (int m = 0; m < n; ++m) {
                const double th = ray_theta(ray[inner], t0, t0_fit) + 2.0 * std::numbers::pi * m;
                const double e = std::abs(sol.series.evaluate_polar(std::abs(ray[inner].t - t0_fit), th) -
                                          ray[inner].alpha);
                if (e < best) {
                    best = e;
                    offset = 2.0 * std::numbers::pi * m;
                }
            }
        }
        for (const auto& s : ray) {
            const Complex tau = s.t - t0_fit;
            const Complex v = sol.series.evaluate_polar(std::abs(tau), ray_theta(s, t0, t0_fit) + offset);
            worst = std::max(worst, std::abs(v - s.alpha) / std::abs(s.alpha));
            ++count;
        }
    }
    out.max_relative_error = worst;
    out.points = count;
    out.t0 = t0_fit;
    out.leading = a;
    out.free_parameters = sol.free_parameters;
    return out;
}

}  // namespace movsing
