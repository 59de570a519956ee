// One line per acceptance criterion; exit status 1 when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "nelson2d/bounds.hpp"
#include "nelson2d/estimator.hpp"
#include "nelson2d/kspace.hpp"
#include "nelson2d/verify.hpp"

using namespace nelson2d;

namespace {

int threads() {
    const char* env = std::getenv("NELSON2D_THREADS");
    return env ? std::max(1, std::atoi(env)) : 1;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %2d %-22s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

void note(const std::string& text) {
    std::printf("     %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ModelParams model(int n, double m_p, double m_b, double g, double lambda) {
    ModelParams p;
    p.n_particles = n;
    p.m_p = m_p;
    p.m_b = m_b;
    p.g = g;
    p.lambda = lambda;
    return p;
}

}  // namespace

int main() {
    const int nthreads = threads();
    const RngStream root(20240601);

    run(1, "density-law", [&] {
        const KsResult a = radial_law_ks(1.0, 0.0, 100000, root.child(1));
        const KsResult b = radial_law_ks(1.0, 1.0, 100000, root.child(2));
        return Outcome{a.pass && b.pass, fmt("KS m_p=0 %.5f, m_p=1 %.5f, 1%% critical %.5f", a.statistic,
                                             b.statistic, a.critical)};
    });

    run(2, "flow-identities", [&] {
        const FlowSummary f = flow_suite(model(2, 1, 1, 1, 5), 100, 1.0, 0.1, root.child(3), nthreads);
        return Outcome{f.max_r2 < 1e-10 && f.max_r3 < 1e-10 && f.max_r4 < 1e-6,
                       fmt("max r2 %.2e, r3 %.2e (< 1e-10), r4 %.2e (< 1e-6)", f.max_r2, f.max_r3, f.max_r4)};
    });

    run(3, "ito-identity", [&] {
        ItoOptions o;
        o.threads = nthreads;
        const ModelParams p = model(2, 1, 1, 1, 5);
        const ItoSummary s = ito_suite(p, o, root.child(4));
        std::string rows;
        for (const auto& r : s.rows) rows += fmt(" eps %.2f: %.3e;", r.epsilon, r.mean_abs_diff);
        // Diagnostics: the same suite with the small-jump Gaussian correction, and
        // with the compensator over the full symbol.
        ItoOptions corr = o;
        corr.n_paths = 50;
        corr.gaussian_correction = true;
        corr.correction_step = 0.01;
        corr.quadrature_paths = 0;
        const ItoSummary c = ito_suite(p, corr, root.child(5));
        std::string crow;
        for (const auto& r : c.rows) crow += fmt(" eps %.2f: %.3e;", r.epsilon, r.mean_abs_diff);
        ItoOptions full = corr;
        full.compensator = CompensatorMode::full;
        full.epsilons = {0.1};
        const ItoSummary fm = ito_suite(p, full, root.child(6));
        note("with Gaussian correction (50 paths):" + crow);
        note(fmt("full-symbol compensator (50 paths): %.3e", fm.rows.front().mean_abs_diff));
        return Outcome{s.monotone && s.below_quadrature,
                       fmt("mean |diff|%s monotone %s; quadrature error %.2e, need final < %.2e", rows.c_str(),
                           s.monotone ? "yes" : "no", s.quadrature_error, 3.0 * s.quadrature_error)};
    });

    run(4, "generator-residual", [&] {
        const GeneratorSummary g = generator_suite(model(2, 1, 1, 1, 3), 20, 1.0, 0.01, root.child(7));
        return Outcome{g.pass, fmt("fine/coarse residual ratio in [%.3f, %.3f], need [0.4, 0.6]", g.min_ratio,
                                   g.max_ratio)};
    });

    run(5, "renorm-energy-oracle", [&] {
        const double e = renorm_energy(0.0, 1.0, model(1, 0, 1, 1, kInf));
        const double exact = kPi * (1.0 - std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0)));
        return Outcome{std::fabs(e - exact) < 1e-8, fmt("|E - exact| = %.2e", std::fabs(e - exact))};
    });

    run(6, "energy-sandwich", [&] {
        const ModelParams p = model(1, 1, 1, 0.3, 10);
        EstimatorOptions o;
        o.sampler.kind = PathSampler::Kind::increments;
        o.sampler.dt = 0.1;
        o.threads = nthreads;
        const WeightFunction f{WeightFunction::Kind::box, 10.0};
        const EstimateReport rep =
            ground_energy(p, PotentialSpec::zero(), {1, 2, 5, 10, 20}, f, 100000, root.child(8), o);
        const double lo = lower_bound(p, BoundConstants{}, LowerBoundVariant::small_coupling);
        const double hi = trial_upper_bound(p, 1.0, 0.0, p.lambda) + p.n_particles * renorm_energy(0.0, p.lambda, p);
        bool ok = true;
        std::string rows;
        for (const auto& r : rep.rows) {
            ok = ok && !r.dropped && r.energy + 2.0 * r.energy_err >= lo && r.energy - 2.0 * r.energy_err <= hi;
            rows += fmt(" t=%g: %.4f(%.4f);", r.t, r.energy, r.energy_err);
        }
        return Outcome{ok, fmt("bounds [%.4f, %.4f];%s", lo, hi, rows.c_str())};
    });

    run(7, "asymptotics", [&] {
        const BoundConstants k;
        struct Case {
            AsymptoticRegime regime;
            ModelParams base;
            double end;
        };
        const std::vector<Case> cases{{AsymptoticRegime::particles, model(1, 1, 1, 1, kInf), 1e6},
                                      {AsymptoticRegime::coupling, model(1, 1, 1, 1, kInf), 1e6},
                                      {AsymptoticRegime::boson_mass_massive, model(2, 1, 1, 1, kInf), 1e-8},
                                      {AsymptoticRegime::boson_mass_massless, model(2, 0, 1, 1, kInf), 1e-8}};
        bool ok = true;
        std::string rows;
        for (const auto& c : cases) {
            const AsymptoticTable t = asymptotic_table(c.regime, {c.end}, c.base, k);
            const auto& r = t.rows.back();
            const double eu = std::fabs(r.upper_ratio / t.target - 1.0), el = std::fabs(r.lower_ratio / t.target - 1.0);
            ok = ok && eu < 0.2 && el < 0.2;
            rows += fmt(" %s: target %.3f, upper %.3f, lower %.3f;", regime_name(c.regime).c_str(), t.target,
                        r.upper_ratio, r.lower_ratio);
        }
        return Outcome{ok, rows.substr(1)};
    });

    run(8, "exp-moment", [&] {
        EstimatorOptions o;
        o.sampler.kind = PathSampler::Kind::increments;
        o.sampler.dt = 0.05;
        o.threads = nthreads;
        const MomentCheck m = exp_moment_check({model(2, 1, 1, 0.5, 10), 2.0},
                                               {{model(1, 1, 1, 0.8, 10), 2.0}, {model(3, 1, 1, 0.4, 10), 1.0}}, 1.0,
                                               4000, root.child(9), o);
        std::string rows;
        for (const auto& r : m.rows)
            rows += fmt(" N=%d g=%.1f%s: %.3f(%.3f) <= %.4g;", r.set.params.n_particles, r.set.params.g,
                        r.held_out ? "" : " (cal)", r.mc, r.stderr_, r.bound);
        return Outcome{m.pass, fmt("c = c' = %.3g;%s", m.constants.c, rows.c_str())};
    });

    run(9, "density-split-scaling", [&] {
        const double e2 = density_norm_exponent(0.5, 1.0, 2.0, 1e-4, 1e-2);
        const double e4 = density_norm_exponent(0.5, 1.0, 4.0, 1e-4, 1e-2);
        const bool ok = std::fabs(e2 / -1.0 - 1.0) < 0.05 && std::fabs(e4 / -1.5 - 1.0) < 0.05;
        return Outcome{ok, fmt("exponent p=2 %.4f (target -1), p=4 %.4f (target -1.5)", e2, e4)};
    });

    run(10, "massless-instability", [&] {
        const ModelParams p = model(1, 1, 0, 1, 10);
        const double s = 1.0, lo = 1e-8, hi = 1e-4;
        const double slope = trial_bound_log_slope(p, s, 10.0, lo, hi);
        const double predicted = trial_bound_slope_prediction(p, s, lo, hi);
        bool decreasing = true;
        double prev = kInf;
        for (double sg = 1e-2; sg >= 1e-12; sg /= 10.0) {
            const double v = trial_upper_bound(p, s, sg, 10.0);
            decreasing = decreasing && v < prev;
            prev = v;
        }
        const bool ok = decreasing && std::fabs(slope / predicted - 1.0) < 0.1;
        return Outcome{ok, fmt("ln sigma slope %.5f, predicted %.5f, bound at sigma=1e-12: %.3f", slope, predicted,
                               prev)};
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
