#include "nelson2d/fock.hpp"

#include <algorithm>
#include <stdexcept>

namespace nelson2d {

namespace {

void check_grid(const FieldFunction& a, const FieldFunction& b) {
    if (!a.grid() || !b.grid() || !a.grid()->same_as(*b.grid()))
        throw std::invalid_argument("fock: grid mismatch");
}

void replay(FieldEvolver& ev, const LevyPath& path, double t) {
    for (const auto& e : path.events) {
        if (e.time > t) break;
        ev.advance(e.time);
        ev.move(e.particle, e.jump);
    }
    ev.advance(t);
}

FieldFunction decayed(const FieldFunction& f, double t) {
    const auto& om = f.grid()->omega();
    std::vector<double> d(om.size());
    for (std::size_t i = 0; i < om.size(); ++i) d[i] = std::exp(-t * om[i]);
    return f.times_radial(d);
}

// sum aw conj(a) b over full arrays
cplx dot(const KGrid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const std::size_t nt = g.n_theta();
    const auto& aw = g.radial_area_weights();
    cplx out = 0.0;
    for (std::size_t ir = 0; ir < g.n_radial(); ++ir) {
        cplx acc = 0.0;
        for (std::size_t it = 0; it < nt; ++it) acc += std::conj(a[ir * nt + it]) * b[ir * nt + it];
        out += aw[ir] * acc;
    }
    return out;
}

}  // namespace

CoherentState CoherentState::vacuum(GridPtr grid) {
    CoherentState s;
    s.profile = FieldFunction::zeros(std::move(grid));
    return s;
}

FieldFunction gaussian_profile(GridPtr grid, double amplitude, double width, const Vec2& center) {
    std::vector<cplx> vals;
    grid->plane_wave(center, vals);
    const std::size_t nt = grid->n_theta();
    for (std::size_t ir = 0; ir < grid->n_radial(); ++ir) {
        const double r = grid->radii()[ir];
        const double a = amplitude * std::exp(-0.5 * r * r * width * width);
        for (std::size_t it = 0; it < nt; ++it) vals[ir * nt + it] *= a;
    }
    return FieldFunction::full(std::move(grid), std::move(vals));
}

CoherentState apply_W(const std::vector<Vec2>& x, const LevyPath& path, double t, double action_u,
                      double potential_integral, const CoherentState& state) {
    if (!state.profile.grid()) throw std::invalid_argument("apply_W: state has no grid");
    if (t == 0.0) return state;
    FieldEvolver ev(state.profile.grid(), x, true);
    replay(ev, path, t);
    const FieldFunction plus = ev.plus_field();
    const FieldFunction minus = ev.minus_field();
    CoherentState out;
    out.log_amplitude = state.log_amplitude + action_u - potential_integral - inner(minus, state.profile);
    out.profile = decayed(state.profile, t);
    out.profile -= plus;
    return out;
}

cplx log_coherent_inner(const CoherentState& a, const CoherentState& b) {
    check_grid(a.profile, b.profile);
    return std::conj(a.log_amplitude) + b.log_amplitude + inner(a.profile, b.profile);
}

cplx coherent_inner(const CoherentState& a, const CoherentState& b) { return std::exp(log_coherent_inner(a, b)); }

FlowResiduals flow_check(const std::vector<Vec2>& x, const LevyPath& path, double t, double s, const GridPtr& grid,
                         const SegmentKernel* kernel) {
    if (t < 0.0 || s < 0.0 || t + s > path.horizon * (1.0 + 1e-12))
        throw std::out_of_range("flow_check: t + s outside path horizon");
    FlowResiduals out;
    if (s == 0.0) return out;
    const auto [disp, tail] = split_path(path, t);
    std::vector<Vec2> xt = x;
    for (std::size_t j = 0; j < xt.size(); ++j) xt[j] += disp[j];

    FieldEvolver whole(grid, x, true), head(grid, x, true), rest(grid, xt, true);
    replay(whole, path, t + s);
    replay(head, path, t);
    replay(rest, tail, s);

    FieldFunction d2 = whole.minus_field();
    d2 -= decayed(rest.minus_field(), t);
    d2 -= head.minus_field();
    out.r2 = l2_norm(d2);
    FieldFunction d3 = whole.plus_field();
    d3 -= rest.plus_field();
    d3 -= decayed(head.plus_field(), s);
    out.r3 = l2_norm(d3);

    const double cross = inner(rest.minus_field(), head.plus_field()).real();
    double u_whole, u_head, u_rest;
    if (kernel) {
        const auto a = direct_action_trace(x, path, {t, t + s}, *kernel);
        u_head = a[0];
        u_whole = a[1];
        u_rest = direct_action_trace(xt, tail, {s}, *kernel)[0];
    } else {
        u_whole = direct_action(x, path, t + s, grid);
        u_head = direct_action(x, path, t, grid);
        u_rest = direct_action(xt, tail, s, grid);
    }
    out.r4 = std::fabs(u_whole - u_rest - u_head - cross);
    return out;
}

GeneratorResidual generator_residual(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid,
                                     const FieldFunction& h1, const FieldFunction& h2, const PotentialSpec& v,
                                     double step) {
    if (grid->truncated()) throw std::domain_error("generator_residual: requires a finite cutoff");
    if (!(step > 0.0)) throw std::invalid_argument("generator_residual: step must be positive");
    if (!h1.grid()->same_as(*grid) || !h2.grid()->same_as(*grid))
        throw std::invalid_argument("generator_residual: grid mismatch");
    const KGrid& g = *grid;
    const int n = path.n_particles;
    const double energy = n * renorm_energy(g.lo(), g.hi(), g.params());

    std::vector<double> ladder;
    const auto steps = static_cast<long>(std::floor(t / step + 1e-9));
    for (long i = 0; i <= steps; ++i) ladder.push_back(i * step);
    for (const auto& e : path.events)
        if (e.time <= t) ladder.push_back(e.time);
    ladder.push_back(t);
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

    const std::vector<cplx> a1 = h1.expanded().values();
    const std::vector<cplx> a2 = h2.expanded().values();
    const std::size_t nt = g.n_theta(), size = g.size();
    std::vector<cplx> f(size), wf(size), src(size);

    FieldEvolver ev(grid, x, true);
    const std::vector<const std::vector<double>*> weights{&g.v()};
    std::vector<cplx> integrals;
    double direct = 0.0, v_int = 0.0;
    cplx m0 = 0.0, quad = 0.0;
    std::size_t next_event = 0;
    GeneratorResidual out;
    out.ladder_points = static_cast<int>(ladder.size());
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double s = ladder[i];
        if (i > 0) {
            const double ds = s - ladder[i - 1];
            ev.integrate_then_advance(s, weights, integrals);
            direct += integrals[0].real();
            v_int += ds * v(ev.positions());
        }
        while (next_event < path.events.size() && path.events[next_event].time <= s) {
            const auto& e = path.events[next_event++];
            ev.move(e.particle, e.jump);
        }
        const auto& up = ev.u_plus();
        const auto& ph = ev.phase_sum();
        for (std::size_t ir = 0; ir < g.n_radial(); ++ir) {
            const double decay = std::exp(-s * g.omega()[ir]);
            for (std::size_t it = 0; it < nt; ++it) {
                const std::size_t k = ir * nt + it;
                f[k] = decay * a2[k] - up[k];
                wf[k] = g.omega()[ir] * f[k];
                src[k] = g.v()[ir] * ph[k];
            }
        }
        const double u = direct - s * energy;
        const cplx log_m = u - v_int - dot(g, ev.u_minus(), a2) + dot(g, a1, f);
        const cplx m = std::exp(log_m);
        if (i == 0) m0 = m;
        const double r = std::abs(m - m0 + quad);
        if (r > out.residual) {
            out.residual = r;
            out.at_time = s;
        }
        if (i + 1 < ladder.size()) {
            const cplx gen = dot(g, a1, wf) + dot(g, src, f) + dot(g, a1, src) + v(ev.positions()) + energy;
            quad += (ladder[i + 1] - s) * m * gen;
        }
    }
    return out;
}

double Wavepacket::operator()(const std::vector<Vec2>& x) const {
    double q = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const Vec2 d = x[j] - centers[j];
        q += d.dot(d);
    }
    return std::exp(-0.5 * q / (width * width));
}

double Wavepacket::l1_norm() const { return std::pow(2.0 * kPi * width * width, static_cast<double>(centers.size())); }

std::vector<Vec2> Wavepacket::sample(RngStream& rng) const {
    std::vector<Vec2> x(centers.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j].x = centers[j].x + width * rng.normal();
        x[j].y = centers[j].y + width * rng.normal();
    }
    return x;
}

SymmetryResult semigroup_symmetry(const Wavepacket& f, const Wavepacket& f2, const FieldFunction& h,
                                  const FieldFunction& h2, const PotentialSpec& v, double t, const RngStream& rng,
                                  const SymmetryOptions& opts) {
    check_grid(h, h2);
    if (f.centers.size() != f2.centers.size()) throw std::invalid_argument("semigroup_symmetry: particle mismatch");
    const GridPtr& grid = h.grid();
    if (grid->truncated()) throw std::domain_error("semigroup_symmetry: requires a finite cutoff");
    const int n = static_cast<int>(f.centers.size());
    const ModelParams& params = grid->params();
    CoherentState a{0.0, h}, b{0.0, h2};
    SymmetryResult out;
    if (t == 0.0) {
        // int f f' dx for Gaussian packets of equal width, times <e(h)|e(h')>.
        double q = 0.0;
        for (int j = 0; j < n; ++j) {
            const Vec2 d = f.centers[j] - f2.centers[j];
            q += d.dot(d);
        }
        const double w2 = f.width * f.width + f2.width * f2.width;
        const double overlap =
            std::pow(2.0 * kPi * f.width * f.width * f2.width * f2.width / w2, n) * std::exp(-0.5 * q / w2);
        out.forward = overlap * coherent_inner(b, a);
        out.backward = overlap * coherent_inner(a, b);
        return out;
    }
    auto estimate = [&](const Wavepacket& start, const Wavepacket& end, const CoherentState& left,
                        const CoherentState& right, std::uint64_t tag, double& err) {
        cplx sum = 0.0;
        double sq = 0.0;
        for (int i = 0; i < opts.n_paths; ++i) {
            RngStream r = rng.child(tag * 0x100000000ull + static_cast<std::uint64_t>(i));
            const std::vector<Vec2> x = start.sample(r);
            JumpPathOptions jo;
            jo.gaussian_correction = opts.gaussian_correction;
            const LevyPath path = sample_jump_path(t, params.m_p, opts.epsilon, n, r, jo);
            std::vector<Vec2> xt = x;
            const auto disp = path.position_at(t);
            for (int j = 0; j < n; ++j) xt[j] += disp[j];
            cplx val = 0.0;
            const PotentialIntegral vi = potential_integral(v, x, path, t);
            if (!vi.diverged) {
                const double u = direct_action(x, path, t, grid);
                const CoherentState moved = apply_W(x, path, t, u, vi.value, right);
                val = start.l1_norm() * end(xt) * std::conj(coherent_inner(left, moved));
            }
            sum += val;
            sq += std::norm(val);
        }
        const double m = opts.n_paths;
        const cplx mean = sum / m;
        err = std::sqrt(std::max(0.0, sq / m - std::norm(mean)) / std::max(1.0, m - 1.0));
        return mean;
    };
    // <Psi'|T Psi> = int f'(x) E[f(X_t) conj <e(h)|W e(h')>] dx
    out.forward = estimate(f2, f, a, b, 1, out.forward_err);
    out.backward = estimate(f, f2, b, a, 2, out.backward_err);
    return out;
}

}  // namespace nelson2d
