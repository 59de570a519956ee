#include "nelson2d/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "nelson2d/fock.hpp"
#include "nelson2d/kspace.hpp"
#include "nelson2d/levy_path.hpp"
#include "nelson2d/radial_kernels.hpp"
#include "nelson2d/special_functions.hpp"

namespace nelson2d {

namespace {

std::vector<Vec2> random_start(int n, RngStream& r) {
    std::vector<Vec2> x(n);
    for (auto& p : x) {
        p.x = 2.0 * r.uniform() - 1.0;
        p.y = 2.0 * r.uniform() - 1.0;
    }
    return x;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a;
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    const double m = mean_of(v), n = static_cast<double>(v.size());
    double q = 0.0;
    for (double a : v) q += (a - m) * (a - m);
    return n > 1.0 ? std::sqrt(q / (n - 1.0) / n) : 0.0;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

std::vector<double> log_ladder(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi > lo) || points < 2) throw std::invalid_argument("log_ladder: bad range");
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return out;
}

}  // namespace

KsResult radial_law_ks(double t, double m_p, long n, const RngStream& rng) {
    if (n < 2) throw std::invalid_argument("radial_law_ks: need at least two samples");
    RngStream r = rng;
    std::vector<double> radii(n);
    for (auto& a : radii) a = sample_increment(t, m_p, r).norm();
    std::sort(radii.begin(), radii.end());
    KsResult out;
    out.n = n;
    for (long i = 0; i < n; ++i) {
        const double f = marginal_radial_cdf(radii[i], t, m_p);
        out.statistic = std::max({out.statistic, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    out.critical = 1.6276 / std::sqrt(static_cast<double>(n));
    out.pass = out.statistic < out.critical;
    return out;
}

FlowSummary flow_suite(const ModelParams& params, long n_paths, double horizon, double epsilon, const RngStream& rng,
                       int threads) {
    params.validate();
    const SegmentKernel kernel(params, params.sigma, params.lambda);
    FlowSummary out;
    out.rows.resize(n_paths);
    parallel_for(n_paths, threads, [&](long i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        const std::vector<Vec2> x = random_start(params.n_particles, r);
        const LevyPath path = sample_jump_path(horizon, params.m_p, epsilon, params.n_particles, r);
        FlowRow& row = out.rows[i];
        row.path_id = i;
        row.t = horizon * r.uniform();
        row.s = (horizon - row.t) * r.uniform();
        row.events = static_cast<long>(path.events.size());
        const GridPtr grid = grid_for_path(params, params.sigma, params.lambda, x, path, GridSpec{});
        row.residuals = flow_check(x, path, row.t, row.s, grid, &kernel);
    });
    for (const auto& row : out.rows) {
        out.max_r2 = std::max(out.max_r2, row.residuals.r2);
        out.max_r3 = std::max(out.max_r3, row.residuals.r3);
        out.max_r4 = std::max(out.max_r4, row.residuals.r4);
    }
    return out;
}

ItoSummary ito_suite(const ModelParams& params, const ItoOptions& opts, const RngStream& rng) {
    params.validate();
    if (!std::isfinite(params.lambda)) throw std::domain_error("ito_suite: needs a finite cutoff");
    const int n = params.n_particles;
    ActionOptions ao;
    ao.compensator = opts.compensator;
    JumpPathOptions jo;
    jo.gaussian_correction = opts.gaussian_correction;
    jo.correction_step = opts.correction_step;
    ItoSummary out;
    for (std::size_t k = 0; k < opts.epsilons.size(); ++k) {
        const double eps = opts.epsilons[k];
        std::vector<double> diffs(opts.n_paths);
        std::vector<ActionParts> parts(opts.n_paths);
        const RngStream base = rng.child(k);
        parallel_for(opts.n_paths, opts.threads, [&](long i) {
            RngStream r = base.child(static_cast<std::uint64_t>(i));
            const std::vector<Vec2> x = random_start(n, r);
            const LevyPath path = sample_jump_path(opts.t, params.m_p, eps, n, r, jo);
            // kappa = sigma: the whole annulus goes through the decomposition
            ActionParts& a = parts[i];
            a = renormalized_action(x, path, opts.t, params, params.sigma, ao);
            const GridPtr grid = grid_for_path(params, params.sigma, params.lambda, x, path, ao.grid);
            a.direct_u = direct_action(x, path, opts.t, grid);
            diffs[i] = std::fabs(a.direct_u - a.u);
        });
        out.rows.push_back({eps, mean_of(diffs), stderr_of(diffs)});
        out.parts.insert(out.parts.end(), parts.begin(), parts.end());
    }
    // Quadrature error of the direct action: doubled radial panels and angles.
    const long nq = std::min(opts.quadrature_paths, opts.n_paths);
    std::vector<double> qerr(std::max<long>(nq, 1), 0.0);
    const RngStream qbase = rng.child(1000);
    parallel_for(nq, opts.threads, [&](long i) {
        RngStream r = qbase.child(static_cast<std::uint64_t>(i));
        const std::vector<Vec2> x = random_start(n, r);
        const LevyPath path = sample_jump_path(opts.t, params.m_p, opts.epsilons.back(), n, r, jo);
        const GridPtr grid = grid_for_path(params, params.sigma, params.lambda, x, path, ao.grid);
        GridSpec fine = ao.grid;
        fine.radial_order = grid->n_radial() > 0 ? ao.grid.radial_order : 16;
        fine.radial_panels = 2 * static_cast<int>(grid->n_radial()) / fine.radial_order;
        fine.angular = 2 * static_cast<int>(grid->n_theta());
        const GridPtr refined = grid_for_path(params, params.sigma, params.lambda, x, path, fine);
        qerr[i] = std::fabs(direct_action(x, path, opts.t, grid) - direct_action(x, path, opts.t, refined));
    });
    out.quadrature_error = mean_of(qerr);
    out.monotone = true;
    for (std::size_t k = 1; k < out.rows.size(); ++k)
        if (!(out.rows[k].mean_abs_diff < out.rows[k - 1].mean_abs_diff)) out.monotone = false;
    out.below_quadrature = !out.rows.empty() && out.rows.back().mean_abs_diff < 3.0 * out.quadrature_error;
    return out;
}

GeneratorSummary generator_suite(const ModelParams& params, long n_paths, double t, double step, const RngStream& rng,
                                 double epsilon) {
    params.validate();
    if (!std::isfinite(params.lambda)) throw std::domain_error("generator_suite: needs a finite cutoff");
    const int n = params.n_particles;
    const PotentialSpec v = PotentialSpec::harmonic(0.1);
    GeneratorSummary out;
    out.min_ratio = kInf;
    out.max_ratio = -kInf;
    for (long i = 0; i < n_paths; ++i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        const std::vector<Vec2> x = random_start(n, r);
        const bool frozen = i % 2 == 0;
        const LevyPath path = frozen ? frozen_path(n, t) : sample_jump_path(t, params.m_p, epsilon, n, r);
        const GridPtr grid = grid_for_path(params, params.sigma, params.lambda, x, path, GridSpec{});
        const FieldFunction h1 = gaussian_profile(grid, 0.3, 1.0);
        const FieldFunction h2 = gaussian_profile(grid, 0.2, 0.8, {0.3, -0.2});
        GeneratorRow row;
        row.path_id = i;
        row.frozen = frozen;
        row.coarse = generator_residual(x, path, t, grid, h1, h2, v, step).residual;
        row.fine = generator_residual(x, path, t, grid, h1, h2, v, step / 2.0).residual;
        row.ratio = row.fine / row.coarse;
        out.min_ratio = std::min(out.min_ratio, row.ratio);
        out.max_ratio = std::max(out.max_ratio, row.ratio);
        out.rows.push_back(row);
    }
    out.pass = !out.rows.empty() && out.min_ratio >= 0.4 && out.max_ratio <= 0.6;
    return out;
}

MomentCheck exp_moment_check(const MomentSet& calibration, const std::vector<MomentSet>& held_out, double p,
                             long n_paths, const RngStream& rng, const EstimatorOptions& opts,
                             const BoundConstants& base, double sup_step) {
    MomentCheck out;
    out.constants = base;
    out.constants.b = 1.0;
    auto estimate = [&](const MomentSet& set, std::uint64_t tag) {
        MomentRow row;
        row.set = set;
        const std::vector<Vec2> x(set.params.n_particles);
        const MomentEstimate m = sup_exp_moment(set.params, x, p, set.t, n_paths, rng.child(tag), opts, sup_step);
        row.mc = m.mean;
        row.stderr_ = m.stderr_;
        return row;
    };
    MomentRow cal = estimate(calibration, 0);
    // log bound = pre + t (c' a1 + c a2) with c = c'
    BoundConstants zero = out.constants;
    zero.c = zero.c_prime = 0.0;
    BoundConstants unit = out.constants;
    unit.c = unit.c_prime = 1.0;
    const double pre = log_exp_moment_bound(calibration.params, zero, p, calibration.t, MomentBound::u1);
    const double slope = log_exp_moment_bound(calibration.params, unit, p, calibration.t, MomentBound::u1) - pre;
    const double c = std::max(0.0, (std::log(cal.mc) - pre) / slope);
    out.constants.c = out.constants.c_prime = c;
    cal.bound = exp_moment_bound(calibration.params, out.constants, p, calibration.t, MomentBound::u1);
    cal.respected = cal.mc <= cal.bound * (1.0 + 1e-12);
    out.rows.push_back(cal);
    out.pass = true;
    for (std::size_t k = 0; k < held_out.size(); ++k) {
        MomentRow row = estimate(held_out[k], k + 1);
        row.held_out = true;
        row.bound = exp_moment_bound(held_out[k].params, out.constants, p, held_out[k].t, MomentBound::u1);
        row.respected = row.mc - 2.0 * row.stderr_ <= row.bound;
        out.pass = out.pass && row.respected;
        out.rows.push_back(row);
    }
    return out;
}

double density_norm_exponent(double L, double m_p, double p, double t_lo, double t_hi, int points) {
    std::vector<double> lx, ly;
    for (double t : log_ladder(t_lo, t_hi, points)) {
        lx.push_back(std::log(t));
        ly.push_back(std::log(density_split_norm(L, m_p, t, p)));
    }
    return fit_slope(lx, ly);
}

double trial_bound_log_slope(const ModelParams& params, double s, double lambda, double sigma_lo, double sigma_hi,
                             int points) {
    std::vector<double> lx, ly;
    for (double sg : log_ladder(sigma_lo, sigma_hi, points)) {
        lx.push_back(std::log(sg));
        ly.push_back(trial_upper_bound(params, s, sg, lambda));
    }
    return fit_slope(lx, ly);
}

double trial_bound_slope_prediction(const ModelParams& params, double s, double sigma_lo, double sigma_hi) {
    const double gn = params.g2() * params.n_particles;
    const double sg2 = sigma_lo * sigma_hi;
    return 2.0 * kPi * params.g2() * params.n_particles * params.n_particles * std::exp(-sg2 / (4.0 * s * gn * gn));
}

}  // namespace nelson2d
