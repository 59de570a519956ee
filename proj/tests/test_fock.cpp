#include <cmath>
#include <vector>

#include "doctest.h"
#include "nelson2d/fock.hpp"

using namespace nelson2d;

namespace {

ModelParams model(int n, double lambda = 5.0) {
    ModelParams p;
    p.n_particles = n;
    p.m_p = 1.0;
    p.m_b = 1.0;
    p.g = 0.8;
    p.lambda = lambda;
    return p;
}

double max_diff(const FieldFunction& a, const FieldFunction& b) {
    auto ea = a.expanded(), eb = b.expanded();
    double m = 0.0;
    for (std::size_t i = 0; i < ea.values().size(); ++i) m = std::max(m, std::abs(ea.values()[i] - eb.values()[i]));
    return m;
}

}  // namespace

TEST_CASE("coherent inner products") {
    auto g = make_grid(model(1), 0.0, 5.0, {});
    auto vac = CoherentState::vacuum(g);
    CHECK(std::abs(coherent_inner(vac, vac) - 1.0) < 1e-15);
    CoherentState a, b;
    a.profile = gaussian_profile(g, 0.5, 1.0);
    a.log_amplitude = cplx(0.2, 0.3);
    b.profile = gaussian_profile(g, 0.4, 0.7, {0.3, 0.1});
    b.log_amplitude = cplx(-0.1, 0.4);
    const cplx expect = std::exp(std::conj(a.log_amplitude) + b.log_amplitude + inner(a.profile, b.profile));
    CHECK(std::abs(coherent_inner(a, b) - expect) < 1e-14);
    CHECK(std::abs(coherent_inner(a, b) - std::conj(coherent_inner(b, a))) < 1e-14);
    // |<e(f)|e(f)>| = exp ||f||^2
    CHECK(std::log(coherent_inner(a, a).real()) == doctest::Approx(2 * 0.2 + std::pow(l2_norm(a.profile), 2)));
    CHECK(real_symmetry_residual(b.profile) < 1e-14);
}

TEST_CASE("W on the vacuum and at time zero") {
    auto p = model(2);
    RngStream rng(1);
    auto path = sample_jump_path(1.0, 1.0, 0.3, 2, rng);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.4, 0.0}};
    auto g = grid_for_path(p, 0.0, 5.0, x, path, {});
    auto vac = CoherentState::vacuum(g);
    auto w = apply_W(x, path, 1.0, 0.7, 0.2, vac);
    CHECK(std::abs(coherent_inner(vac, w) - std::exp(0.5)) < 1e-14);
    auto minus_up = u_process(USign::plus, x, path, 1.0, g);
    minus_up *= -1.0;
    CHECK(max_diff(w.profile, minus_up) < 1e-15);

    CoherentState h;
    h.profile = gaussian_profile(g, 0.3, 1.0);
    auto same = apply_W(x, path, 0.0, 0.0, 0.0, h);
    CHECK(max_diff(same.profile, h.profile) == 0.0);
    CHECK(same.log_amplitude == h.log_amplitude);
}

TEST_CASE("W composes along the split path") {
    auto p = model(2);
    RngStream rng(2);
    auto path = sample_jump_path(2.0, 1.0, 0.2, 2, rng);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.4, -0.3}};
    auto g = grid_for_path(p, 0.0, 5.0, x, path, {});
    CoherentState h;
    h.profile = gaussian_profile(g, 0.3, 1.0, {0.1, 0.2});
    const double t = 0.8, s = 1.1;
    auto whole = apply_W(x, path, t + s, 0.0, 0.0, h);
    auto [disp, tail] = split_path(path, t);
    std::vector<Vec2> xt = x;
    for (int j = 0; j < 2; ++j) xt[j] += disp[j];
    auto composed = apply_W(xt, tail, s, 0.0, 0.0, apply_W(x, path, t, 0.0, 0.0, h));
    CHECK(max_diff(whole.profile, composed.profile) < 1e-13);
    // the cross term <U^-_s[tail] | U^+_t> belongs to the action flow
    const cplx cross = inner(u_process(USign::minus, xt, tail, s, g), u_process(USign::plus, x, path, t, g));
    CHECK(std::abs(composed.log_amplitude - whole.log_amplitude - cross) < 1e-12);
    CHECK(std::abs(cross) > 1e-3);

    const auto r = flow_check(x, path, t, s, g);
    CHECK(r.r2 < 1e-10);
    CHECK(r.r3 < 1e-10);
    SegmentKernel kernel(p, 0.0, 5.0);
    CHECK(flow_check(x, path, t, s, g, &kernel).r4 < 1e-6);
}

TEST_CASE("generator residual is first order in the ladder step") {
    auto p = model(2, 3.0);
    RngStream rng(3);
    auto path = sample_jump_path(0.5, 1.0, 0.3, 2, rng);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.3, 0.2}};
    auto g = grid_for_path(p, 0.0, 3.0, x, path, {});
    auto h1 = gaussian_profile(g, 0.3, 1.0);
    auto h2 = gaussian_profile(g, 0.2, 0.8, {0.3, -0.2});
    const auto v = PotentialSpec::harmonic(0.1);
    const double a = generator_residual(x, path, 0.5, g, h1, h2, v, 0.02).residual;
    const double b = generator_residual(x, path, 0.5, g, h1, h2, v, 0.01).residual;
    CHECK(b < a);
    CHECK(b / a == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("wavepackets") {
    Wavepacket f{{{0.0, 0.0}, {1.0, 1.0}}, 0.5};
    CHECK(f.l1_norm() == doctest::Approx(std::pow(2 * kPi * 0.25, 2)));
    CHECK(f({{0.0, 0.0}, {1.0, 1.0}}) == doctest::Approx(1.0));
    RngStream rng(4);
    double mx = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) mx += f.sample(rng)[1].x;
    CHECK(mx / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("semigroup is symmetric") {
    auto p = model(1, 4.0);
    auto g = make_grid(p, 0.0, 4.0, {});
    Wavepacket f{{{0.0, 0.0}}, 0.7}, f2{{{0.3, 0.0}}, 0.6};
    auto h = gaussian_profile(g, 0.3, 1.0);
    auto h2 = gaussian_profile(g, 0.2, 0.9, {0.2, 0.0});
    SymmetryOptions o;
    o.n_paths = 200;
    o.epsilon = 0.2;
    const auto r = semigroup_symmetry(f, f2, h, h2, PotentialSpec::harmonic(0.1), 0.5, RngStream(5), o);
    const double tol = 4.0 * std::hypot(r.forward_err, r.backward_err);
    CHECK(std::abs(r.forward - std::conj(r.backward)) < tol);
}
