#include "nelson2d/special_functions.hpp"

#include <array>
#include <stdexcept>

#include "nelson2d/quadrature.hpp"

namespace nelson2d {

namespace {

// Chebyshev coefficients in t = 128/r^2 - 1 for r >= 8, computed with mpmath at
// 50 digits from P = sqrt(pi r/2)(J0 cos chi + Y0 sin chi) and
// r Q = r sqrt(pi r/2)(Y0 cos chi - J0 sin chi), chi = r - pi/4.
constexpr std::array<double, 18> kChebP = {
    0.99946034934751866537,    -0.00053652204681321174247, 3.0751847875194746219e-6,
    -5.170594537606097701e-8,  1.6306464635151383095e-9,   -7.864091377237069999e-11,
    5.1682623873491924622e-12, -4.3045788699253912224e-13, 4.3265957431549405642e-14,
    -5.0690340959352360775e-15, 6.7480722157338737041e-16, -1.0011513723467785834e-16,
    1.6305919233744184736e-17, -2.880866169482871202e-18,  5.4680827832590383688e-19,
    -1.1062036496829716611e-19, 2.369495793472131619e-20,  -5.3442156878460062432e-21};
constexpr std::array<double, 18> kChebQ = {
    -0.1244468368426960728,    0.00054708159540893196795,  -5.9315987288485178116e-6,
    1.4377965798375193428e-7,  -5.8175327494930559835e-9,  3.3760975237349907551e-10,
    -2.5653979367973077957e-11, 2.404916100281365049e-12,  -2.6690625482579415976e-13,
    3.4041800321963688986e-14, -4.8799441053120400078e-15, 7.7297031762426053902e-16,
    -1.334885217150251704e-16, 2.486595238939051547e-17,   -4.952892629886515942e-18,
    1.0473158973776097239e-18, -2.3369301722114218899e-19, 5.4745819157106007935e-20};

constexpr double kSeriesSwitch = 8.0;

double clenshaw(const std::array<double, 18>& c, double t) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size() - 1; k > 0; --k) {
        const double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

double j0_series(double r) {
    const long double q = static_cast<long double>(r) * r / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 60; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-22) break;
    }
    return static_cast<double>(sum);
}

double j0_hankel(double r) {
    const double t = 128.0 / (r * r) - 1.0;
    const double p = clenshaw(kChebP, t);
    const double q = clenshaw(kChebQ, t) / r;
    const double c = std::cos(r), s = std::sin(r);
    const double cchi = (c + s) / std::sqrt(2.0);
    const double schi = (s - c) / std::sqrt(2.0);
    return std::sqrt(2.0 / (kPi * r)) * (p * cchi - q * schi);
}

}  // namespace

double bessel_j0(double r) {
    r = std::fabs(r);
    if (r < kSeriesSwitch) return j0_series(r);
    return j0_hankel(r);
}

double one_minus_j0(double r) {
    r = std::fabs(r);
    if (r >= 1.0) return 1.0 - bessel_j0(r);
    const double q = r * r / 4.0;
    double term = 1.0, sum = 0.0;
    for (int k = 1; k < 30; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum -= term;
        if (std::fabs(term) < 1e-20 * std::fabs(sum)) break;
    }
    return sum;
}

double bessel_k32(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k: argument must be positive");
    return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * (1.0 + 1.0 / x);
}

double bessel_k(double order, double x) {
    if (order != 1.5) throw std::invalid_argument("bessel_k: only order 3/2 is implemented");
    return bessel_k32(x);
}

double levy_jump_density_radial(double r, double m_p) {
    if (!(r > 0.0)) return 0.0;
    if (m_p == 0.0) return 1.0 / (2.0 * kPi * r * r * r);
    return std::pow(m_p, 1.5) * bessel_k32(m_p * r) / (std::sqrt(2.0) * std::pow(kPi * r, 1.5));
}

double levy_jump_density(const Vec2& y, double m_p) { return levy_jump_density_radial(y.norm(), m_p); }

double levy_tail_mass(double eps, double m_p) {
    if (!(eps > 0.0)) throw std::domain_error("levy_tail_mass: threshold must be positive");
    return std::exp(-m_p * eps) / eps;
}

double levy_small_jump_variance(double eps, double m_p) {
    if (!(eps > 0.0)) throw std::domain_error("levy_small_jump_variance: threshold must be positive");
    const double x = m_p * eps;
    if (x < 1e-4) return 0.5 * eps * (1.0 - x * x / 3.0);
    // int_0^eps e^{-m s}(m s + 1) ds = 2(1 - e^{-m eps})/m - eps e^{-m eps}
    return 0.5 * (-2.0 * std::expm1(-x) / m_p - eps * std::exp(-x));
}

double marginal_density_radial(double r, double t, double m_p) {
    if (!(t > 0.0)) throw std::domain_error("marginal_density: t must be positive");
    const double R = std::hypot(t, r);
    if (m_p == 0.0) return t / (2.0 * kPi * R * R * R);
    // 2 (m/2pi)^{3/2} t e^{mt} K_{3/2}(mR) / R^{3/2}, exponents combined
    return t * std::exp(m_p * (t - R)) * (m_p * R + 1.0) / (2.0 * kPi * R * R * R);
}

double marginal_density(const Vec2& y, double t, double m_p) {
    return marginal_density_radial(y.norm(), t, m_p);
}

double marginal_radial_cdf(double a, double t, double m_p) {
    if (!(t > 0.0)) throw std::domain_error("marginal_radial_cdf: t must be positive");
    if (!(a > 0.0)) return 0.0;
    const double R = std::hypot(t, a);
    if (m_p == 0.0) return 1.0 - t / R;
    return 1.0 - t * std::exp(m_p * (t - R)) / R;
}

double density_split_norm(double L, double m_p, double t, double p) {
    if (!(m_p > 0.0)) throw std::domain_error("density_split_norm: needs m_p > 0");
    if (!(L >= 0.0 && L < m_p)) throw std::domain_error("density_split_norm: needs 0 <= L < m_p");
    if (!(t > 0.0 && m_p * t < 1.0)) throw std::domain_error("density_split_norm: needs 0 < m_p t < 1");
    if (!(p >= 1.0)) throw std::domain_error("density_split_norm: needs p >= 1");
    const double r_max = std::sqrt(1.0 / (m_p * m_p) - t * t);
    auto f = [&](double r) { return r * std::pow(std::exp(L * r) * marginal_density_radial(r, t, m_p), p); };
    const double mid = std::min(t, r_max);
    double sum = integrate_adaptive(f, 0.0, mid, 1e-11);
    if (r_max > mid) {
        // the tail decays like a power of r, so integrate in log r
        auto g = [&](double z) {
            const double r = std::exp(z);
            return r * f(r);
        };
        sum += integrate_adaptive(g, std::log(mid), std::log(r_max), 1e-11);
    }
    return std::pow(2.0 * kPi * sum, 1.0 / p);
}

}  // namespace nelson2d
