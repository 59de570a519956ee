#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "nelson2d/action.hpp"
#include "nelson2d/csv.hpp"
#include "nelson2d/quadrature.hpp"

using namespace nelson2d;

namespace {

ModelParams model(int n, double g, double lambda, double sigma = 0.0) {
    ModelParams p;
    p.n_particles = n;
    p.m_p = 1.0;
    p.m_b = 1.0;
    p.g = g;
    p.sigma = sigma;
    p.lambda = lambda;
    return p;
}

// Direct action of a constant path from the radial integral of v^2 |sum_j e^{-ik.x_j}|^2.
double frozen_direct(const std::vector<Vec2>& x, double t, const ModelParams& p) {
    auto f = [&](double r) {
        const double w = omega_of(r, p.m_b);
        double pairs = 0.0;
        for (const auto& a : x)
            for (const auto& b : x) pairs += std::cyl_bessel_j(0.0, r * distance(a, b));
        return 2.0 * kPi * r * p.g2() / (w * w) * (t + std::expm1(-t * w) / w) * pairs;
    };
    return integrate_adaptive(f, p.sigma, p.lambda, 1e-12) - t * static_cast<double>(x.size()) * renorm_energy(p.sigma, p.lambda, p);
}

GridSpec fine() {
    GridSpec s;
    s.radial_panels = 24;
    return s;
}

}  // namespace

TEST_CASE("direct action of a frozen configuration") {
    auto p = model(3, 0.7, 8.0);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.6, 0.0}, {-0.2, 0.9}};
    const double t = 1.4;
    auto path = frozen_path(3, t);
    auto grid = grid_for_path(p, 0.0, 8.0, x, path, fine());
    const double oracle = frozen_direct(x, t, p);
    CHECK(direct_action(x, path, t, grid) == doctest::Approx(oracle).epsilon(1e-10));
    SegmentKernel kernel(p, 0.0, 8.0);
    CHECK(direct_action_trace(x, path, {t}, kernel)[0] == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("interaction term") {
    auto p1 = model(1, 1.0, 8.0);
    RngStream rng(1);
    auto path = sample_jump_path(1.0, 1.0, 0.2, 1, rng);
    CHECK(interaction_term({{0.0, 0.0}}, path, 1.0, 0.0, 8.0, p1) == 0.0);

    auto p2 = model(2, 1.0, 8.0);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.8, 0.0}};
    CHECK(interaction_term(x, frozen_path(2, 2.0), 1.5, 0.0, 8.0, p2) ==
          doctest::Approx(2.0 * 1.5 * pair_potential_radial(0.8, 0.0, 8.0, p2)).epsilon(1e-7));
}

TEST_CASE("boundary term vanishes at time zero and is bounded") {
    auto p = model(2, 1.0, 6.0);
    RngStream rng(2);
    for (int i = 0; i < 5; ++i) {
        auto path = sample_jump_path(2.0, 1.0, 0.3, 2, rng);
        const std::vector<Vec2> x{{0.0, 0.0}, {0.5, 0.5}};
        auto grid = grid_for_path(p, 0.0, 6.0, x, path, {});
        CHECK(boundary_term(x, path, 0.0, grid) == 0.0);
        // |<U^+|beta>| <= N^2 g^2 int 2 pi r / (omega^2 (omega + psi)) dr
        auto f = [](double r) { return 2.0 * kPi * r / (std::pow(omega_of(r, 1.0), 2) * (omega_of(r, 1.0) + psi_of(r, 1.0))); };
        CHECK(std::fabs(boundary_term(x, path, 2.0, grid)) <= 4.0 * integrate_adaptive(f, 0.0, 6.0));
    }
}

TEST_CASE("full compensator reproduces the direct action pathwise") {
    RngStream rng(3);
    for (int n : {1, 2}) {
        auto p = model(n, 0.9, 6.0);
        auto path = sample_jump_path(1.0, 1.0, 0.2, n, rng);
        std::vector<Vec2> x(n);
        if (n == 2) x[1] = {0.4, -0.1};
        ActionOptions o;
        o.compensator = CompensatorMode::full;
        const auto parts = renormalized_action(x, path, 1.0, p, 1.5, o);
        CHECK(parts.u == doctest::Approx(parts.direct_u).epsilon(1e-7));
        CHECK(parts.imag_residual < 1e-8);
        // the split scale does not matter
        const auto other = renormalized_action(x, path, 1.0, p, 3.5, o);
        CHECK(other.u == doctest::Approx(parts.u).epsilon(1e-7));
        CHECK(other.direct_u == doctest::Approx(parts.direct_u).epsilon(1e-9));
    }
}

TEST_CASE("action is symmetric under relabelling and scales with g^2") {
    RngStream rng(4);
    auto p = model(2, 0.8, 6.0);
    auto path = sample_jump_path(1.0, 1.0, 0.25, 2, rng);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.7, 0.2}};
    auto swapped = path;
    for (auto& e : swapped.events) e.particle = 1 - e.particle;
    const std::vector<Vec2> xs{x[1], x[0]};
    const auto a = renormalized_action(x, path, 1.0, p, 2.0);
    const auto b = renormalized_action(xs, swapped, 1.0, p, 2.0);
    CHECK(b.u == doctest::Approx(a.u).epsilon(1e-10));
    auto p2 = p;
    p2.g = 1.6;
    const auto c = renormalized_action(x, path, 1.0, p2, 2.0);
    CHECK(c.u == doctest::Approx(4.0 * a.u).epsilon(1e-10));
    CHECK(c.direct_u == doctest::Approx(4.0 * a.direct_u).epsilon(1e-10));
}

TEST_CASE("martingale term has mean zero") {
    RngStream rng(5);
    auto p = model(1, 1.0, 8.0);
    const int n = 300;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto path = sample_jump_path(1.0, 1.0, 0.3, 1, rng);
        auto grid = grid_for_path(p, 1.0, 8.0, {{0.0, 0.0}}, path, {});
        const double m = martingale_term({{0.0, 0.0}}, path, 1.0, grid).m;
        sum += m;
        sum2 += m * m;
    }
    const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::fabs(mean) < 4.0 * se);
}

TEST_CASE("infinite cutoff action converges as the grid is raised") {
    RngStream rng(6);
    auto p = model(2, 0.8, kInf);
    auto path = sample_jump_path(0.5, 1.0, 0.3, 2, rng);
    const std::vector<Vec2> x{{0.0, 0.0}, {0.5, 0.0}};
    GridSpec lo, hi;
    lo.r_max = 64.0;
    hi.r_max = 256.0;
    ActionOptions a, b;
    a.grid = lo;
    b.grid = hi;
    const auto u1 = renormalized_action(x, path, 0.5, p, 2.0, a);
    const auto u2 = renormalized_action(x, path, 0.5, p, 2.0, b);
    CHECK(std::isfinite(u1.u));
    CHECK(u2.tail_bound < u1.tail_bound);
    CHECK(std::fabs(u1.u - u2.u) <= u1.tail_bound);
    CHECK(std::isnan(u1.direct_u));
}

TEST_CASE("action rejects bad input") {
    auto p = model(2, 1.0, 5.0);
    auto path = frozen_path(2, 1.0);
    CHECK_THROWS(renormalized_action({{0.0, 0.0}}, path, 1.0, p, 1.0));
    CHECK_THROWS(renormalized_action({{0.0, 0.0}, {1.0, 0.0}}, path, 1.0, p, -1.0));
    CHECK(default_kappa(p) == 2.0);
}

TEST_CASE("action CSV rows line up with the header") {
    ActionParts parts;
    parts.u = 1.5;
    const auto header = action_csv_header();
    const auto row = action_csv_row(7, parts);
    CHECK(header.size() == row.size());
    CHECK(row[0] == "7");
    std::ostringstream s;
    CsvWriter w(s);
    w.row(header);
    w.row(row);
    const auto back = parse_csv(s.str());
    REQUIRE(back.size() == 2);
    CHECK(back[1] == row);
}
