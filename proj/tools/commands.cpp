#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "nelson2d/action.hpp"
#include "nelson2d/bounds.hpp"
#include "nelson2d/csv.hpp"
#include "nelson2d/estimator.hpp"
#include "nelson2d/kspace.hpp"
#include "nelson2d/levy_path.hpp"
#include "nelson2d/special_functions.hpp"
#include "nelson2d/verify.hpp"

namespace nelson2d::cli {

using nlohmann::json;

namespace {

std::ofstream open_out(const CommandContext& ctx, const char* name) {
    std::ofstream f(ctx.out / name, std::ios::binary);
    if (!f) throw std::runtime_error(std::string("cannot write ") + (ctx.out / name).string());
    return f;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RngStream stream(const RunConfig& c) { return RngStream(c.seed); }

void require_finite_cutoff(const RunConfig& c, const char* what) {
    if (!std::isfinite(c.model.lambda))
        throw ConfigError(std::string(what) + " needs a finite model.lambda", "model.lambda");
}

CommandResult cmd_sample(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    auto csv_file = open_out(ctx, "results.csv");
    auto jl = open_out(ctx, "paths.jsonl");
    CsvWriter csv(csv_file);
    csv.row(std::vector<std::string>{"path_id", "time", "particle", "dx", "dy", "kind"});
    const RngStream rng = stream(c);
    long events = 0;
    for (long i = 0; i < c.verify.n_paths; ++i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        const LevyPath path = c.sampler.sample(c.verify.t, c.model.m_p, c.model.n_particles, r);
        for (const auto& e : path.events) {
            const char* kind = e.kind == EventKind::jump ? "jump" : e.kind == EventKind::diffusive ? "diffusive" : "increment";
            csv.row({std::to_string(i), csv_number(e.time), std::to_string(e.particle), csv_number(e.jump.x),
                     csv_number(e.jump.y), kind});
        }
        events += static_cast<long>(path.events.size());
        jl << path_to_json_lines(path);
    }
    CommandResult res;
    res.summary = {{"paths", c.verify.n_paths}, {"events", events}, {"horizon", c.verify.t}};
    return res;
}

CommandResult cmd_density_check(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const KsResult ks = radial_law_ks(c.verify.t, c.model.m_p, c.verify.samples, stream(c));
    // Empirical against model CDF at the deciles of a fresh sample.
    RngStream r = stream(c).child(1);
    std::vector<double> radii(std::max<long>(c.verify.samples, 10));
    for (auto& a : radii) a = sample_increment(c.verify.t, c.model.m_p, r).norm();
    std::sort(radii.begin(), radii.end());
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"quantile", "radius", "model_cdf"});
    for (int q = 1; q < 10; ++q) {
        const double rq = radii[static_cast<std::size_t>(q * radii.size() / 10)];
        csv.row(std::vector<double>{q / 10.0, rq, marginal_radial_cdf(rq, c.verify.t, c.model.m_p)});
    }
    CommandResult res;
    res.summary = {{"ks_statistic", ks.statistic}, {"critical_1pct", ks.critical}, {"samples", ks.n}, {"pass", ks.pass}};
    res.exit_code = ks.pass ? ok : verification_failure;
    return res;
}

CommandResult cmd_action_verify(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    require_finite_cutoff(c, "action-verify");
    ItoOptions o;
    o.epsilons = c.verify.epsilons;
    o.n_paths = c.verify.n_paths;
    o.t = c.verify.t;
    o.gaussian_correction = c.sampler.gaussian_correction;
    o.correction_step = c.sampler.correction_step;
    o.threads = c.threads;
    const ItoSummary s = ito_suite(c.model, o, stream(c));
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"epsilon", "mean_abs_diff", "stderr"});
    for (const auto& r : s.rows) csv.row(std::vector<double>{r.epsilon, r.mean_abs_diff, r.stderr_});
    auto fa = open_out(ctx, "actions.csv");
    CsvWriter acsv(fa);
    acsv.row(action_csv_header());
    for (std::size_t i = 0; i < s.parts.size(); ++i)
        acsv.row(action_csv_row(static_cast<long>(i % std::max<long>(1, o.n_paths)), s.parts[i]));
    CommandResult res;
    res.summary = {{"quadrature_error", s.quadrature_error},
                   {"monotone", s.monotone},
                   {"below_3x_quadrature", s.below_quadrature}};
    res.exit_code = s.monotone && s.below_quadrature ? ok : verification_failure;
    return res;
}

CommandResult cmd_flow_verify(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    require_finite_cutoff(c, "flow-verify");
    const FlowSummary s = flow_suite(c.model, c.verify.n_paths, c.verify.t, c.sampler.epsilon, stream(c), c.threads);
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"path_id", "t", "s", "events", "r2", "r3", "r4"});
    for (const auto& r : s.rows)
        csv.row(std::vector<double>{static_cast<double>(r.path_id), r.t, r.s, static_cast<double>(r.events),
                                    r.residuals.r2, r.residuals.r3, r.residuals.r4});
    const bool pass = s.max_r2 < 1e-10 && s.max_r3 < 1e-10 && s.max_r4 < 1e-6;
    CommandResult res;
    res.summary = {{"max_r2", s.max_r2}, {"max_r3", s.max_r3}, {"max_r4", s.max_r4}, {"pass", pass}};
    res.exit_code = pass ? ok : verification_failure;
    return res;
}

CommandResult cmd_generator_verify(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    require_finite_cutoff(c, "generator-verify");
    const GeneratorSummary s =
        generator_suite(c.model, c.verify.n_paths, c.verify.t, c.verify.ladder_step, stream(c), c.sampler.epsilon);
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"path_id", "frozen", "residual_step", "residual_half_step", "ratio"});
    for (const auto& r : s.rows)
        csv.row({std::to_string(r.path_id), r.frozen ? "1" : "0", csv_number(r.coarse), csv_number(r.fine),
                 csv_number(r.ratio)});
    CommandResult res;
    res.summary = {{"min_ratio", s.min_ratio}, {"max_ratio", s.max_ratio}, {"pass", s.pass}};
    res.exit_code = s.pass ? ok : verification_failure;
    return res;
}

CommandResult cmd_estimate(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const EstimateReport rep = ground_energy(c.model, c.estimator.potential.build(), c.estimator.t_ladder,
                                             c.estimator.weight, c.estimator.n_paths, stream(c), c.estimator_options());
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"t", "mean", "stderr", "n_eff", "energy", "energy_err"});
    for (const auto& r : rep.rows) csv.row(std::vector<double>{r.t, r.mean, r.stderr_, r.n_eff, r.energy, r.energy_err});
    auto fj = open_out(ctx, "report.json");
    fj << report_to_json(rep) << "\n";
    CommandResult res;
    res.summary = {{"extrapolated", num(rep.extrapolated)},
                   {"extrapolated_err", num(rep.extrapolated_err)},
                   {"method", rep.method},
                   {"diverged", rep.diverged}};
    return res;
}

CommandResult cmd_bounds(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const BoundConstants& k = c.constants;
    const ModelParams& p = c.model;
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"kind", "name", "value"});
    const std::vector<std::pair<const char*, double>> constants{
        {"b", k.b},         {"b_prime", k.b_prime}, {"c", k.c},         {"c_prime", k.c_prime},
        {"c_upper", k.c_upper}, {"c_theta", k.c_theta}, {"c_star", k.c_star}, {"alpha", k.alpha},
        {"theta", k.theta}, {"s", k.s},             {"eps", k.eps}};
    for (const auto& [name, v] : constants) csv.row({"constant", name, csv_number(v)});
    json summary = json::object();
    auto emit = [&](const char* name, const std::function<double()>& eval) {
        try {
            const double v = eval();
            csv.row({"bound", name, csv_number(v)});
            summary[name] = num(v);
        } catch (const std::domain_error& e) {
            csv.row({"bound", name, "n/a"});
            summary[name] = e.what();
        }
    };
    const double lambda = std::isfinite(p.lambda) ? p.lambda : kInf;
    emit("lower_small_coupling", [&] { return lower_bound(p, k, LowerBoundVariant::small_coupling); });
    emit("lower_large_coupling", [&] { return lower_bound(p, k, LowerBoundVariant::large_coupling); });
    emit("lower_large_coupling_massive", [&] { return lower_bound(p, k, LowerBoundVariant::large_coupling_massive); });
    emit("lower_single_particle", [&] {
        if (p.n_particles != 1) throw std::domain_error("single-particle bound needs N = 1");
        return single_particle_lower_bound(p.g, p.m_p, k.c);
    });
    emit("upper_renormalized", [&] { return renormalized_upper_bound(p, k); });
    emit("trial_upper", [&] { return trial_upper_bound(p, k.s, p.sigma, lambda); });
    emit("trial_upper_plus_counter_term", [&] {
        return trial_upper_bound(p, k.s, p.sigma, lambda) + p.n_particles * renorm_energy(p.sigma, lambda, p);
    });
    emit("trial_at_scale", [&] {
        const double cut = trial_cutoff(p);
        return trial_upper_bound(p, k.s, 0.0, cut) + p.n_particles * renorm_energy(0.0, cut, p);
    });
    emit("trial_at_scale_rhs", [&] { return trial_bound_at_scale_rhs(p, k); });
    emit("exp_moment_u1", [&] { return exp_moment_bound(p, k, c.verify.moment_p, c.verify.t, MomentBound::u1); });
    emit("exp_moment_u2", [&] { return exp_moment_bound(p, k, c.verify.moment_p, c.verify.t, MomentBound::u2); });
    CommandResult res;
    res.summary = summary;
    return res;
}

CommandResult cmd_asymptotics(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const AsymptoticRegime regime = parse_regime(ctx.regime.empty() ? c.asymptotics.regime : ctx.regime);
    const AsymptoticTable t = asymptotic_table(regime, c.asymptotics.grid, c.model, c.constants);
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"x", "upper_ratio", "lower_ratio", "target"});
    for (const auto& r : t.rows) csv.row(std::vector<double>{r.x, r.upper_ratio, r.lower_ratio, t.target});
    CommandResult res;
    res.summary = {{"regime", regime_name(regime)}, {"target", t.target}};
    if (!t.rows.empty())
        res.summary["endpoint"] = {{"x", t.rows.back().x},
                                   {"upper_ratio", t.rows.back().upper_ratio},
                                   {"lower_ratio", t.rows.back().lower_ratio}};
    return res;
}

CommandResult cmd_expmoment(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const double pw = c.verify.moment_p, t = c.verify.t;
    const std::vector<Vec2> x(c.model.n_particles);
    const MomentEstimate m =
        sup_exp_moment(c.model, x, pw, t, c.estimator.n_paths, stream(c), c.estimator_options(), c.verify.sup_step);
    const double b1 = exp_moment_bound(c.model, c.constants, pw, t, MomentBound::u1);
    double b2 = std::nan("");
    try {
        b2 = exp_moment_bound(c.model, c.constants, pw, t, MomentBound::u2);
    } catch (const std::domain_error&) {
    }
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"p", "t", "mc", "stderr", "bound_u1", "bound_u2"});
    csv.row(std::vector<double>{pw, t, m.mean, m.stderr_, b1, b2});
    const bool respected = m.mean - 2.0 * m.stderr_ <= std::min(b1, std::isnan(b2) ? kInf : b2);
    CommandResult res;
    res.summary = {{"mc", m.mean}, {"stderr", m.stderr_}, {"bound_u1", num(b1)}, {"bound_u2", num(b2)},
                   {"respected", respected}};
    res.exit_code = respected ? ok : verification_failure;
    return res;
}

CommandResult cmd_kato_probe(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const double cap = c.kato.cap;
    auto fn = [cap](const Vec2& y) {
        const double r = y.norm();
        return r > 0.0 ? std::min(1.0 / r, cap) : cap;
    };
    std::vector<Vec2> grid;
    const int n = std::max(1, c.kato.x_points);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = n == 1 ? 0.0 : -c.kato.x_extent + 2.0 * c.kato.x_extent * i / (n - 1);
            const double b = n == 1 ? 0.0 : -c.kato.x_extent + 2.0 * c.kato.x_extent * j / (n - 1);
            grid.push_back({a, b});
        }
    const KatoTable t =
        kato_probe(fn, c.model.m_p, c.kato.t_ladder, grid, c.estimator.n_paths, stream(c), c.sampler);
    auto f = open_out(ctx, "results.csv");
    CsvWriter csv(f);
    csv.row(std::vector<std::string>{"t", "sup_value", "stderr", "argmax_x", "argmax_y"});
    for (const auto& r : t.rows) csv.row(std::vector<double>{r.t, r.sup_value, r.stderr_, r.argmax.x, r.argmax.y});
    CommandResult res;
    res.summary = {{"decreasing", t.decreasing}};
    res.exit_code = t.decreasing ? ok : verification_failure;
    return res;
}

}  // namespace

const std::map<std::string, CommandInfo>& commands() {
    static const std::map<std::string, CommandInfo> table{
        {"sample", {cmd_sample, "sample paths and dump their events"}},
        {"density-check", {cmd_density_check, "KS test of sampled |X_t| against the radial law"}},
        {"action-verify", {cmd_action_verify, "direct action against w - c + m over an epsilon sweep"}},
        {"flow-verify", {cmd_flow_verify, "flow identities on random jump paths"}},
        {"generator-verify", {cmd_generator_verify, "integral-equation residual at two ladder spacings"}},
        {"estimate", {cmd_estimate, "Monte Carlo minimal-energy estimate"}},
        {"bounds", {cmd_bounds, "evaluate the closed-form energy and moment bounds"}},
        {"asymptotics", {cmd_asymptotics, "ratio table of the bounds in one asymptotic regime"}},
        {"expmoment", {cmd_expmoment, "E[sup e^{p u}] against the moment bounds"}},
        {"kato-probe", {cmd_kato_probe, "small-time probe of sup_x E[int f(x + X_s) ds]"}},
    };
    return table;
}

}  // namespace nelson2d::cli
