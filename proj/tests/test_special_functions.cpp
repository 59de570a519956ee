#include <cmath>
#include <vector>

#include "doctest.h"
#include "nelson2d/quadrature.hpp"
#include "nelson2d/rng.hpp"
#include "nelson2d/special_functions.hpp"

using namespace nelson2d;

namespace {

// (1/2pi) int_0^{2pi} cos(r sin t) dt; the periodic trapezoid rule is spectrally accurate.
double j0_by_quadrature(double r) {
    const int n = static_cast<int>(2 * r) + 64;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::cos(r * std::sin(2.0 * kPi * i / n));
    return s / n;
}

double k32_by_quadrature(double x) {
    auto f = [x](double t) { return 0.5 * std::sqrt(t) * std::exp(-0.5 * x * (t + 1.0 / t)); };
    return integrate_adaptive(f, 0.0, 1.0, 1e-13) + integrate_adaptive(f, 1.0, kInf, 1e-13);
}

}  // namespace

TEST_CASE("bessel_j0 matches the integral representation") {
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(std::fabs(bessel_j0(2.404825557695773)) < 1e-10);
    for (double r : {0.1, 1.0, 3.7, 7.99, 8.01, 12.5, 40.0, 100.0, 1234.5, 1e4}) {
        CHECK(std::fabs(bessel_j0(r) - j0_by_quadrature(r)) < 1e-12 + 1e-15 * r);
    }
}

TEST_CASE("bessel_j0 envelope") {
    double c = 0.0;
    for (double r = 1.0; r < 2000.0; r *= 1.01) c = std::max(c, std::fabs(bessel_j0(r)) * std::sqrt(r));
    CHECK(c < 0.8);
    CHECK(std::fabs(bessel_j0(100.0)) <= c / 10.0);
}

TEST_CASE("one_minus_j0 is accurate for small arguments") {
    for (double r : {1e-8, 1e-4, 1e-2, 0.5, 3.0, 20.0}) {
        const double series = r * r / 4.0 - std::pow(r, 4) / 64.0 + std::pow(r, 6) / 2304.0;
        if (r < 1e-2)
            CHECK(one_minus_j0(r) == doctest::Approx(series).epsilon(1e-12));
        else
            CHECK(one_minus_j0(r) == doctest::Approx(1.0 - bessel_j0(r)).epsilon(1e-12));
    }
}

TEST_CASE("bessel_k of order 3/2") {
    CHECK(bessel_k(1.5, 1.0) == doctest::Approx(k32_by_quadrature(1.0)).epsilon(1e-10));
    CHECK(bessel_k(1.5, 0.2) == doctest::Approx(k32_by_quadrature(0.2)).epsilon(1e-10));
    for (double x : {0.01, 0.7, 5.0, 30.0})
        CHECK(bessel_k32(x) == doctest::Approx(std::sqrt(kPi / (2 * x)) * std::exp(-x) * (1 + 1 / x)).epsilon(1e-12));
    const double c = std::sqrt(kPi / 2.0) * 2.0;
    for (double x : {1e-3, 0.1, 0.5, 1.0}) CHECK(bessel_k(1.5, x) <= c / std::pow(x, 1.5));
    CHECK(bessel_k(1.5, 10.0) <= c * std::exp(-10.0) / std::sqrt(10.0));
    CHECK_THROWS(bessel_k(1.5, 0.0));
    CHECK_THROWS(bessel_k(1.5, -1.0));
    CHECK_THROWS(bessel_k(0.5, 1.0));
}

TEST_CASE("levy jump density") {
    CHECK(levy_jump_density({0.0, 0.0}, 1.0) == 0.0);
    CHECK(levy_jump_density({2.0, 0.0}, 0.0) == doctest::Approx(1.0 / (16.0 * kPi)).epsilon(1e-14));
    for (double m : {0.5, 1.0, 3.0}) {
        const double r = 1e-6;
        CHECK(levy_jump_density_radial(r, m) / levy_jump_density_radial(r, 0.0) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(levy_jump_density_radial(r, m) * r * r * r == doctest::Approx(0.5 / kPi).epsilon(1e-5));
    }
}

TEST_CASE("tail mass and small-jump variance agree with quadrature") {
    CHECK(levy_tail_mass(1.0, 0.0) == doctest::Approx(1.0));
    for (double m : {0.0, 1.0, 2.5})
        for (double eps : {0.05, 0.3, 1.0}) {
            auto tail = [m](double r) { return 2.0 * kPi * r * levy_jump_density_radial(r, m); };
            CHECK(levy_tail_mass(eps, m) == doctest::Approx(integrate_adaptive(tail, eps, kInf, 1e-12)).epsilon(1e-9));
            auto second = [m](double r) { return kPi * r * r * r * levy_jump_density_radial(r, m); };
            CHECK(levy_small_jump_variance(eps, m) ==
                  doctest::Approx(integrate_adaptive(second, 0.0, eps, 1e-12)).epsilon(1e-9));
        }
}

TEST_CASE("marginal density closed forms") {
    CHECK(marginal_density({0.0, 0.0}, 2.0, 0.0) == doctest::Approx(1.0 / (2.0 * kPi * 4.0)));
    const Vec2 y{0.7, -1.1};
    const double t = 0.8, r2 = y.dot(y);
    CHECK(marginal_density(y, t, 0.0) == doctest::Approx(t / (2.0 * kPi * std::pow(t * t + r2, 1.5))));
    CHECK_THROWS(marginal_density(y, 0.0, 1.0));
    // Hankel transform recovers the characteristic function exp(-t (sqrt(k^2 + m^2) - m)).
    for (double m : {0.0, 1.3})
        for (double k : {0.5, 2.0}) {
            auto f = [&](double r) { return 2.0 * kPi * r * marginal_density_radial(r, t, m) * bessel_j0(k * r); };
            const double ft = integrate_panels(f, 0.0, 2000.0, 20000, 16);
            CHECK(ft == doctest::Approx(std::exp(-t * (std::sqrt(k * k + m * m) - m))).epsilon(2e-6));
        }
}

TEST_CASE("marginal density is a rotationally symmetric probability density") {
    for (auto [m, t] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {1.0, 0.5}, {2.0, 3.0}}) {
        auto f = [m = m, t = t](double r) { return 2.0 * kPi * r * marginal_density_radial(r, t, m); };
        CHECK(integrate_adaptive(f, 0.0, kInf, 1e-12) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(marginal_radial_cdf(1.7, t, m) == doctest::Approx(integrate_adaptive(f, 0.0, 1.7, 1e-12)).epsilon(1e-10));
    }
    RngStream rng(3);
    for (int i = 0; i < 20; ++i) {
        const Vec2 y{3.0 * rng.normal(), 3.0 * rng.normal()};
        const double a = 2.0 * kPi * rng.uniform();
        const Vec2 z{std::cos(a) * y.x - std::sin(a) * y.y, std::sin(a) * y.x + std::cos(a) * y.y};
        CHECK(marginal_density(z, 0.7, 1.0) == doctest::Approx(marginal_density(y, 0.7, 1.0)).epsilon(1e-13));
    }
}

TEST_CASE("marginal densities form a convolution semigroup") {
    const double m = 1.0, t = 0.5;
    for (double a : {0.0, 0.4, 1.5}) {
        // (rho_t * rho_t)(a, 0) in polar coordinates around the origin
        auto radial = [&](double r) {
            auto ang = [&](double th) {
                const double dx = a - r * std::cos(th), dy = -r * std::sin(th);
                return marginal_density_radial(std::hypot(dx, dy), t, m);
            };
            return r * marginal_density_radial(r, t, m) * 2.0 * integrate_panels(ang, 0.0, kPi, 16, 32);
        };
        const double conv = integrate_panels(radial, 0.0, 2.0, 40, 32) + integrate_adaptive(radial, 2.0, kInf, 1e-10);
        CHECK(conv == doctest::Approx(marginal_density_radial(a, 2.0 * t, m)).epsilon(1e-6));
    }
}

TEST_CASE("density split norm") {
    auto brute = [](double L, double m, double t, double p) {
        const double rmax = std::sqrt(1.0 / (m * m) - t * t);
        auto f = [&](double r) { return 2.0 * kPi * r * std::pow(std::exp(L * r) * marginal_density_radial(r, t, m), p); };
        return std::pow(integrate_panels(f, 0.0, t, 20, 32) + integrate_panels(f, t, rmax, 400, 32), 1.0 / p);
    };
    CHECK(density_split_norm(0.5, 1.0, 0.05, 2.0) == doctest::Approx(brute(0.5, 1.0, 0.05, 2.0)).epsilon(1e-8));
    CHECK(density_split_norm(0.2, 2.0, 0.1, 4.0) == doctest::Approx(brute(0.2, 2.0, 0.1, 4.0)).epsilon(1e-8));
    // L^1 norm of the near part is a probability
    CHECK(density_split_norm(0.0, 1.0, 0.01, 1.0) < 1.0);
    CHECK_THROWS(density_split_norm(1.0, 1.0, 0.1, 2.0));
    CHECK_THROWS(density_split_norm(0.5, 1.0, 1.5, 2.0));
    CHECK_THROWS(density_split_norm(0.5, 0.0, 0.1, 2.0));
}
