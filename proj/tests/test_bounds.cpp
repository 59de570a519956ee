#include <cmath>
#include <vector>

#include "doctest.h"
#include "nelson2d/bounds.hpp"
#include "nelson2d/kspace.hpp"
#include "nelson2d/quadrature.hpp"
#include "nelson2d/rng.hpp"

using namespace nelson2d;

namespace {

ModelParams model(int n, double g, double m_p = 1.0, double m_b = 1.0) {
    ModelParams p;
    p.n_particles = n;
    p.g = g;
    p.m_p = m_p;
    p.m_b = m_b;
    return p;
}

}  // namespace

TEST_CASE("bound constants are validated") {
    BoundConstants k;
    CHECK_NOTHROW(k.validate());
    auto bad = k;
    bad.c_star = 1.0;
    CHECK_THROWS(bad.validate());
    bad = k;
    bad.theta = 1.0;
    CHECK_THROWS(bad.validate());
    bad = k;
    bad.alpha = 0.5;
    CHECK_THROWS(bad.validate());
    bad = k;
    bad.b = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("small-coupling lower bound") {
    BoundConstants k;
    // N = 1 has no interaction part: -b g^4 / m_b e^{8 pi g^2 / m_b}
    const double g = 0.1;
    CHECK(lower_bound(model(1, g), k, LowerBoundVariant::small_coupling) ==
          doctest::Approx(-std::pow(g, 4) * std::exp(8 * kPi * g * g)));
    // g^4 scaling as g -> 0
    const double a = lower_bound(model(3, 1e-3), k, LowerBoundVariant::small_coupling);
    const double b = lower_bound(model(3, 2e-3), k, LowerBoundVariant::small_coupling);
    CHECK(b / a == doctest::Approx(16.0).epsilon(1e-3));
    CHECK(a < 0.0);
}

TEST_CASE("large-coupling lower bounds") {
    BoundConstants k;
    const auto p = model(4, 2.0, 0.0, 1.0);
    const double lead = kPi * 4.0 * (2 * 16 - 4) * std::log(16.0);
    CHECK(lower_bound(p, k, LowerBoundVariant::large_coupling) == doctest::Approx(-lead - 4.0 * 16 - 0.0));
    CHECK_THROWS_AS(lower_bound(model(1, 0.5), k, LowerBoundVariant::large_coupling), std::domain_error);
    CHECK_THROWS_AS(lower_bound(p, k, LowerBoundVariant::large_coupling_massive), std::domain_error);
    // massive form for N = 1 is the single-particle bound
    const auto q = model(1, 1.5, 2.0, 0.3);
    CHECK(lower_bound(q, k, LowerBoundVariant::large_coupling_massive) ==
          doctest::Approx(single_particle_lower_bound(1.5, 2.0, k.c)));
    CHECK(single_particle_lower_bound(1.5, 2.0, 1.0) == single_particle_lower_bound(1.5, 2.0, 1.0));
    CHECK_THROWS(single_particle_lower_bound(1.0, 0.0, 1.0));
}

TEST_CASE("exponential moment bounds") {
    BoundConstants k;
    const auto p = model(2, 0.3);
    double prev = -kInf;
    for (double t : {0.0, 0.5, 1.0, 4.0}) {
        const double v = log_exp_moment_bound(p, k, 1.0, t, MomentBound::u1);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(log_exp_moment_bound(p, k, 2.0, 1.0, MomentBound::u1) > log_exp_moment_bound(p, k, 1.0, 1.0, MomentBound::u1));
    // t = 0 leaves N ln b + (1/2) ln(alpha/(alpha-1)) + 2 pi p N^2 g^2 / m_b
    CHECK(log_exp_moment_bound(p, k, 1.0, 0.0, MomentBound::u1) ==
          doctest::Approx(0.5 * std::log(2.0) + 2 * kPi * 4 * 0.09));
    // p -> 0 the bound tends to the prefactor
    CHECK(log_exp_moment_bound(p, k, 1e-9, 3.0, MomentBound::u1) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-6));
    const auto weak = model(2, 0.1);
    CHECK(exp_moment_bound(weak, k, 1.0, 1.0, MomentBound::u1) ==
          doctest::Approx(std::exp(log_exp_moment_bound(weak, k, 1.0, 1.0, MomentBound::u1))));
    CHECK_THROWS_AS(log_exp_moment_bound(p, k, 1.0, 1.0, MomentBound::u2), std::domain_error);
    const auto strong = model(2, 2.0);
    CHECK(log_exp_moment_bound(strong, k, 1.0, 1.0, MomentBound::u2) >
          log_exp_moment_bound(strong, k, 1.0, 0.5, MomentBound::u2));
    CHECK_THROWS(log_exp_moment_bound(p, k, 0.0, 1.0, MomentBound::u1));
}

TEST_CASE("trial upper bound against radial quadrature") {
    for (auto [n, g, mb, s] : std::vector<std::tuple<int, double, double, double>>{{1, 1.0, 1.0, 1.0}, {3, 0.7, 0.5, 0.3}}) {
        auto p = model(n, g, 1.0, mb);
        const double gn = g * g * n;
        auto f = [&](double r) { return 2 * kPi * r * std::exp(-r * r / (4 * s * gn * gn)) / (r * r + mb * mb); };
        const double expect = std::sqrt(kPi * s / 2) * g * g * n * n - g * g * n * n * integrate_adaptive(f, 0.1, 20.0);
        CHECK(trial_upper_bound(p, s, 0.1, 20.0) == doctest::Approx(expect).epsilon(1e-10));
    }
    auto p = model(2, 1.0);
    CHECK_THROWS_AS(trial_upper_bound(p, 1.0, 0.0, kInf), std::domain_error);
    CHECK_THROWS_AS(trial_upper_bound(model(2, 1.0, 0.0, 0.0), 1.0, 0.0, 10.0), std::domain_error);
    CHECK(std::fabs(trial_upper_bound(p, 1e-10, 0.0, 10.0)) < 1e-4);
    const auto best = best_trial_scale(p, 0.0, 10.0, {0.1, 0.3, 1.0, 3.0});
    for (double s : {0.1, 0.3, 1.0, 3.0}) CHECK(best.value <= trial_upper_bound(p, s, 0.0, 10.0));
}

TEST_CASE("massless trial bound grows logarithmically in the infrared") {
    auto p = model(2, 1.0, 0.0, 0.0);
    const double a = trial_upper_bound(p, 1.0, 1e-6, 10.0);
    const double b = trial_upper_bound(p, 1.0, 1e-7, 10.0);
    CHECK(b < a);
    CHECK((a - b) / std::log(10.0) == doctest::Approx(2 * kPi * 4).epsilon(1e-6));
}

TEST_CASE("trial cutoff and the bound at that scale") {
    BoundConstants k;
    const auto p = model(2, 2.0, 1.0, 1.0);
    CHECK(trial_cutoff(p) == doctest::Approx(std::sqrt(63.0)));
    CHECK_THROWS(trial_cutoff(model(1, 0.5)));
    // the trial energy plus N E^ren at the cutoff respects the stated right side
    const double lambda = trial_cutoff(p);
    const double lhs = trial_upper_bound(p, k.s, 0.0, lambda) + 2 * renorm_energy(0.0, lambda, p);
    CHECK(lhs <= trial_bound_at_scale_rhs(p, k));
}

TEST_CASE("renormalized upper bound") {
    BoundConstants k;
    CHECK_THROWS_AS(renormalized_upper_bound(model(1, 1.0, 1.0, 1.0), k), std::domain_error);
    // massless particles add -pi theta g^2 N ln(min(1, g^2 N) / m_b)
    const auto p0 = model(2, 0.6, 0.0, 0.3), p1 = model(2, 0.6, 1e-12, 0.3);
    const double gn = 0.72;
    CHECK(renormalized_upper_bound(p0, k) - renormalized_upper_bound(p1, k) ==
          doctest::Approx(-kPi * k.theta * gn * std::log(gn / 0.3)).epsilon(1e-9));
    // N = 1 with massive particles does not depend on m_b
    CHECK(renormalized_upper_bound(model(1, 2.0, 1.0, 0.1), k) == renormalized_upper_bound(model(1, 2.0, 1.0, 2.0), k));
    // theta -> 1 recovers the full logarithmic coefficient
    auto k1 = k;
    k1.theta = 1.0 - 1e-12;
    k1.c_theta = 0.0;
    k1.c_upper = 0.0;
    const auto q = model(3, 1.0, 1.0, 1.0);
    CHECK(renormalized_upper_bound(q, k1) == doctest::Approx(-kPi * 3 * (2 * 2 * std::log(3.0) + std::log(3.0))));
}

TEST_CASE("upper bound lies above the lower bound on a random box") {
    BoundConstants k;
    RngStream rng(7);
    for (int i = 0; i < 500; ++i) {
        const int n = 1 + static_cast<int>(rng.uniform() * 20);
        const double g = std::exp(-1.0 + 4.0 * rng.uniform());
        const double mp = rng.uniform() < 0.3 ? 0.0 : 3.0 * rng.uniform();
        const double mb = 0.05 + 2.0 * rng.uniform();
        const auto p = model(n, g, mp, mb);
        if (!(g * g * n > std::sqrt(2.0) * mb)) continue;
        const auto variant = mp > 0.0 ? LowerBoundVariant::large_coupling_massive : LowerBoundVariant::large_coupling;
        CHECK(lower_bound(p, k, variant) <= renormalized_upper_bound(p, k));
    }
}

TEST_CASE("asymptotic tables approach their targets") {
    BoundConstants k;
    struct Case {
        AsymptoticRegime regime;
        std::vector<double> grid;
        ModelParams base;
    };
    const std::vector<Case> cases{
        {AsymptoticRegime::particles, {1e2, 1e4, 1e6}, model(1, 1.0, 1.0, 1.0)},
        {AsymptoticRegime::coupling, {1e2, 1e4, 1e6}, model(3, 1.0, 1.0, 1.0)},
        {AsymptoticRegime::boson_mass_massive, {1e-2, 1e-4, 1e-6}, model(3, 1.0, 1.0, 1.0)},
        {AsymptoticRegime::boson_mass_massless, {1e-2, 1e-4, 1e-6}, model(3, 1.0, 0.0, 1.0)},
    };
    for (const auto& c : cases) {
        const auto t = asymptotic_table(c.regime, c.grid, c.base, k);
        CHECK(t.target == asymptotic_target(c.regime, c.base));
        REQUIRE(t.rows.size() == 3);
        // the upper bound carries theta in front of its logarithms
        for (std::size_t i = 1; i < 3; ++i) {
            CHECK(std::fabs(t.rows[i].upper_ratio / t.target - k.theta) <
                  std::fabs(t.rows[i - 1].upper_ratio / t.target - k.theta));
            CHECK(std::fabs(t.rows[i].lower_ratio / t.target - 1.0) < std::fabs(t.rows[i - 1].lower_ratio / t.target - 1.0));
        }
        CHECK(regime_name(parse_regime(regime_name(c.regime))) == regime_name(c.regime));
    }
    CHECK(asymptotic_target(AsymptoticRegime::particles, model(1, 2.0)) == doctest::Approx(-8 * kPi));
    CHECK(parse_regime("particles") == AsymptoticRegime::particles);
    CHECK_THROWS(parse_regime("bogus"));
    CHECK_THROWS(asymptotic_table(AsymptoticRegime::boson_mass_massless, {0.1}, model(2, 1.0, 1.0), k));
}
