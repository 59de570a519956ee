#include "nelson2d/action.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "nelson2d/special_functions.hpp"

namespace nelson2d {

namespace {

void check_inputs(const std::vector<Vec2>& x, const LevyPath& path, double t) {
    if (static_cast<int>(x.size()) != path.n_particles)
        throw std::invalid_argument("action: x has wrong particle count");
    if (t < 0.0 || t > path.horizon * (1.0 + 1e-12) + 1e-300)
        throw std::out_of_range("action: t outside path horizon");
}

struct GridPass {
    cplx direct = 0.0;       // int <U+ | v^N> ds
    cplx c = 0.0;
    cplx jump_sum = 0.0;
    cplx compensator = 0.0;  // int <U+ | symbol beta^N> ds
};

// One sweep of the field along the path.  The compensator weight (symbol times beta)
// is optional.
GridPass grid_pass(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid,
                   bool want_direct, const std::vector<double>* comp_weight) {
    FieldEvolver ev(grid, x, false);
    std::vector<const std::vector<double>*> weights;
    if (want_direct) weights.push_back(&grid->v());
    if (comp_weight) weights.push_back(comp_weight);
    const bool want_jumps = comp_weight != nullptr;
    GridPass out;
    std::vector<cplx> integrals;
    auto step = [&](double s) {
        ev.integrate_then_advance(s, weights, integrals);
        std::size_t k = 0;
        if (want_direct) out.direct += integrals[k++];
        if (comp_weight) out.compensator += integrals[k++];
    };
    for (const auto& e : path.events) {
        if (e.time > t) break;
        step(e.time);
        const cplx h = ev.move(e.particle, e.jump, want_jumps ? &grid->beta() : nullptr);
        out.jump_sum += h;
    }
    step(t);
    if (want_jumps) out.c = ev.overlap(grid->beta());
    return out;
}

std::vector<double> compensator_weight(const KGrid& grid, const LevyPath& path, CompensatorMode mode,
                                       int panels) {
    const std::size_t nr = grid.n_radial();
    std::vector<double> symbol;
    if (mode == CompensatorMode::full || !(path.epsilon > 0.0)) {
        symbol = grid.psi();
    } else {
        symbol = truncated_symbol_table(grid, path.epsilon, panels);
        if (path.gaussian_correction) {
            const double var = levy_small_jump_variance(path.epsilon, grid.params().m_p);
            for (std::size_t i = 0; i < nr; ++i) symbol[i] += 0.5 * var * grid.radii()[i] * grid.radii()[i];
        }
    }
    for (std::size_t i = 0; i < nr; ++i) symbol[i] *= grid.beta()[i];
    return symbol;
}

double imag_of(const GridPass& p) {
    return std::max({std::fabs(p.direct.imag()), std::fabs(p.c.imag()), std::fabs(p.jump_sum.imag()),
                     std::fabs(p.compensator.imag())});
}

}  // namespace

GridPtr grid_for_path(const ModelParams& params, double lo, double hi, const std::vector<Vec2>& x,
                      const LevyPath& path, const GridSpec& spec) {
    GridSpec s = spec;
    s.extent = std::max(spec.extent, path.extent(x));
    return make_grid(params, lo, hi, s);
}

double interaction_term(const std::vector<Vec2>& x, const LevyPath& path, double t, const PairPotentialTable& w) {
    check_inputs(x, path, t);
    const int n = path.n_particles;
    if (n < 2) return 0.0;
    std::vector<Vec2> pos = x;
    auto pair_sum = [&]() {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = j + 1; l < n; ++l) acc += 2.0 * w(pos[j] - pos[l]);
        return acc;
    };
    double total = 0.0, cur = 0.0;
    for (const auto& e : path.events) {
        if (e.time > t) break;
        total += (e.time - cur) * pair_sum();
        cur = e.time;
        pos[e.particle] += e.jump;
    }
    total += (t - cur) * pair_sum();
    return total;
}

double interaction_term(const std::vector<Vec2>& x, const LevyPath& path, double t, double sigma, double lambda,
                        const ModelParams& params) {
    check_inputs(x, path, t);
    const int n = path.n_particles;
    if (n < 2) return 0.0;
    std::vector<Vec2> pos = x;
    auto pair_sum = [&]() {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = j + 1; l < n; ++l) acc += 2.0 * pair_potential(pos[j] - pos[l], sigma, lambda, params);
        return acc;
    };
    double total = 0.0, cur = 0.0;
    for (const auto& e : path.events) {
        if (e.time > t) break;
        if (e.time > cur) total += (e.time - cur) * pair_sum();
        cur = e.time;
        pos[e.particle] += e.jump;
    }
    if (t > cur) total += (t - cur) * pair_sum();
    return total;
}

double boundary_term(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid) {
    check_inputs(x, path, t);
    FieldEvolver ev(grid, x, false);
    for (const auto& e : path.events) {
        if (e.time > t) break;
        ev.advance(e.time);
        ev.move(e.particle, e.jump);
    }
    ev.advance(t);
    return ev.overlap(grid->beta()).real();
}

MartingaleParts martingale_term(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid,
                                CompensatorMode mode, int symbol_panels) {
    check_inputs(x, path, t);
    const auto weight = compensator_weight(*grid, path, mode, symbol_panels);
    const GridPass p = grid_pass(x, path, t, grid, false, &weight);
    MartingaleParts out;
    out.jump_sum = p.jump_sum.real();
    // int (e^{-ik.z} - 1) dnu(z) = -symbol(k)
    out.compensator = -p.compensator.real();
    out.m = out.jump_sum - out.compensator;
    return out;
}

double direct_action(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid) {
    check_inputs(x, path, t);
    if (grid->truncated()) throw std::domain_error("direct_action: requires a finite cutoff");
    const GridPass p = grid_pass(x, path, t, grid, true, nullptr);
    return p.direct.real() - t * path.n_particles * renorm_energy(grid->lo(), grid->hi(), grid->params());
}

double default_kappa(const ModelParams& params) { return std::max(params.g2() * params.n_particles, 2.0 * params.m_b); }

ActionParts renormalized_action(const std::vector<Vec2>& x, const LevyPath& path, double t,
                                const ModelParams& params, double kappa, const ActionOptions& opts) {
    check_inputs(x, path, t);
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("renormalized_action: kappa must be finite and >= 0");
    const double sigma = params.sigma, lambda = params.lambda;
    const int n = path.n_particles;
    ActionParts out;
    out.epsilon = path.epsilon;
    const double split = std::clamp(kappa, sigma, lambda);
    out.kappa = split;

    double low = 0.0;
    if (split > sigma) {
        const GridPtr g = grid_for_path(params, sigma, split, x, path, opts.grid);
        low = grid_pass(x, path, t, g, true, nullptr).direct.real();
        out.counter_term = t * n * renorm_energy(sigma, split, params);
        low -= out.counter_term;
    }
    if (split >= lambda) {
        out.u = low;
        out.direct_u = low;
        return out;
    }

    const GridPtr g = grid_for_path(params, split, lambda, x, path, opts.grid);
    const auto weight = compensator_weight(*g, path, opts.compensator, opts.symbol_panels);
    const GridPass p = grid_pass(x, path, t, g, std::isfinite(lambda), &weight);
    if (n > 1) {
        const PairPotentialTable table(params, split, lambda, 0.0, 0.0, opts.cache_dir);
        out.w = interaction_term(x, path, t, table);
    }
    out.c = p.c.real();
    out.m = p.jump_sum.real() + p.compensator.real();
    out.u = low + out.w - out.c + out.m;
    out.imag_residual = imag_of(p);
    if (std::isfinite(lambda)) {
        const double upper_counter = t * n * renorm_energy(split, lambda, params);
        out.direct_u = low + p.direct.real() - upper_counter;
        out.counter_term += upper_counter;
    } else {
        // Omitted momenta above the truncation: |c| and every |h| are bounded by
        // multiples of g^2 N / omega(r_max).
        const double top = g->radii().empty() ? split : g->radii().back();
        const double per = 2.0 * kPi * params.g2() * n / omega_of(top, params.m_b);
        const double rate = path.epsilon > 0.0 ? levy_tail_mass(path.epsilon, params.m_p) : 0.0;
        out.tail_bound = per * n + 2.0 * per * (static_cast<double>(path.events.size()) + t * n * rate);
    }
    return out;
}

std::vector<double> direct_action_trace(const std::vector<Vec2>& x, const LevyPath& path,
                                        const std::vector<double>& times, const SegmentKernel& kernel,
                                        double* sup, double sup_step) {
    const int n = path.n_particles;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("direct_action_trace: wrong particle count");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("direct_action_trace: times must be sorted");
    if (times.empty()) {
        if (sup) *sup = 0.0;
        return {};
    }
    const double t_end = times.back();
    if (times.front() < 0.0 || t_end > path.horizon * (1.0 + 1e-12) + 1e-300)
        throw std::out_of_range("direct_action_trace: time outside path horizon");

    const ModelParams& params = kernel.params();
    const double g2 = params.g2();
    const double energy = n * renorm_energy(kernel.sigma(), kernel.lambda(), params);
    const double tau_max = kernel.tau_max();

    struct Source {
        double tau;
        Vec2 q;
        double sign;
    };
    std::vector<Source> sources;
    for (int j = 0; j < n; ++j) sources.push_back({0.0, x[j], 1.0});
    std::vector<Vec2> pos = x;

    // Checkpoints: requested times, events, and the optional sup ladder.
    std::vector<double> checkpoints(times.begin(), times.end());
    if (sup) {
        for (const auto& e : path.events)
            if (e.time <= t_end) checkpoints.push_back(e.time);
        if (sup_step > 0.0)
            for (double s = sup_step; s < t_end; s += sup_step) checkpoints.push_back(s);
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    double static_sum = 0.0;
    auto refresh_static = [&]() {
        static_sum = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) static_sum += kernel.static_part(distance(pos[j], pos[l]));
    };
    refresh_static();

    std::vector<double> out;
    out.reserve(times.size());
    double integral = 0.0, cur = 0.0, best = 0.0;
    std::size_t next_event = 0, next_time = 0;
    for (double p : checkpoints) {
        // Events strictly before p move the path before integrating up to p.
        while (next_event < path.events.size() && path.events[next_event].time < p) {
            const auto& e = path.events[next_event];
            if (e.time > cur) {
                // Integrate up to the event, then apply it.
                const double s0 = cur, s1 = e.time;
                double acc = (s1 - s0) * static_sum;
                for (const auto& src : sources)
                    for (int l = 0; l < n; ++l) {
                        const double d = distance(src.q, pos[l]);
                        acc -= src.sign * (kernel.memory_part(d, s0 - src.tau) - kernel.memory_part(d, s1 - src.tau));
                    }
                integral += g2 * acc;
                cur = s1;
            }
            const Vec2 old = pos[e.particle];
            pos[e.particle] += e.jump;
            sources.push_back({e.time, pos[e.particle], 1.0});
            sources.push_back({e.time, old, -1.0});
            refresh_static();
            ++next_event;
        }
        if (p > cur) {
            const double s0 = cur, s1 = p;
            double acc = (s1 - s0) * static_sum;
            for (const auto& src : sources)
                for (int l = 0; l < n; ++l) {
                    const double d = distance(src.q, pos[l]);
                    acc -= src.sign * (kernel.memory_part(d, s0 - src.tau) - kernel.memory_part(d, s1 - src.tau));
                }
            integral += g2 * acc;
            cur = p;
            sources.erase(std::remove_if(sources.begin(), sources.end(),
                                         [&](const Source& s) { return cur - s.tau >= tau_max; }),
                          sources.end());
        }
        const double u = integral - cur * energy;
        best = std::max(best, u);
        while (next_time < times.size() && times[next_time] <= p) {
            out.push_back(u);
            ++next_time;
        }
    }
    if (sup) *sup = best;
    return out;
}

std::vector<std::string> action_csv_header() {
    return {"path_id", "w", "c", "m", "u", "direct_u", "epsilon", "kappa"};
}

std::vector<std::string> action_csv_row(long path_id, const ActionParts& parts) {
    auto num = [](double v) {
        if (std::isnan(v)) return std::string();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    return {std::to_string(path_id), num(parts.w), num(parts.c), num(parts.m),
            num(parts.u), num(parts.direct_u), num(parts.epsilon), num(parts.kappa)};
}

}  // namespace nelson2d
