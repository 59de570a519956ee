#include "nelson2d/radial_kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <functional>
#include <boost/math/special_functions/bessel.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "nelson2d/quadrature.hpp"
#include "nelson2d/special_functions.hpp"

namespace nelson2d {

namespace {

// Four-point Lagrange weights for a node offset t in [0, 3].
void lagrange4(double t, double l[4]) {
    const double a = t, b = t - 1.0, c = t - 2.0, d = t - 3.0;
    l[0] = -b * c * d / 6.0;
    l[1] = a * c * d / 2.0;
    l[2] = -a * b * d / 2.0;
    l[3] = a * b * c / 6.0;
}

// First stencil index and offset for x / h on a table of n points.
int stencil(double s, int n, double& t) {
    int i0 = static_cast<int>(std::floor(s)) - 1;
    i0 = std::clamp(i0, 0, n - 4);
    t = s - i0;
    return i0;
}

// Stencil for a function even in its argument: indices below 0 are mirrored.
void even_stencil(double s, int n, double& t, int idx[4]) {
    int i0 = std::min(static_cast<int>(std::floor(s)) - 1, n - 4);
    t = s - i0;
    for (int a = 0; a < 4; ++a) idx[a] = std::abs(i0 + a);
}

double integrand_f(double r, const ModelParams& p) {
    const double w = omega_of(r, p.m_b);
    return 1.0 / (w * (w + psi_of(r, p.m_p)));
}

// Coefficients of f = 1/(omega (omega + psi)) in powers x^n of x = 1/omega, n = 2..6.
std::array<double, 5> expansion_coefficients(const ModelParams& p) {
    const double mb2 = p.m_b * p.m_b, mp = p.m_p, mp2 = mp * mp;
    return {0.5, mp / 4.0, mb2 / 8.0, mp * (2.0 * mb2 - mp2) / 16.0, mb2 * (2.0 * mb2 - mp2) / 32.0};
}

double model_f(double r, const ModelParams& p, const std::array<double, 5>& c) {
    const double x = 1.0 / omega_of(r, p.m_b);
    double acc = 0.0;
    for (int n = 6; n >= 2; --n) acc = (acc + c[n - 2]) * x;
    return acc * x;
}

// Panels no wider than fine below 8 fine, where omega varies on the scale m_b.
double oscillatory_integral(const std::function<double(double)>& f, double lo, double hi, double d,
                            double fine = kInf) {
    if (!(hi > lo)) return 0.0;
    const double width = std::min(2.0, 3.0 / std::max(d, 1e-300));
    const double near_width = std::min(width, fine);
    const double mid = std::clamp(8.0 * fine, lo, hi);
    double out = 0.0;
    if (mid > lo) out += integrate_panels(f, lo, mid, std::max(1, static_cast<int>(std::ceil((mid - lo) / near_width))), 16);
    if (hi > mid) out += integrate_panels(f, mid, hi, std::max(2, static_cast<int>(std::ceil((hi - mid) / width))), 16);
    return out;
}

double fine_scale(const ModelParams& p) {
    double m = 1.0;
    if (p.m_b > 0.0) m = std::min(m, p.m_b);
    if (p.m_p > 0.0) m = std::min(m, p.m_p);
    return 0.5 * m;
}

// (w_{sigma,inf}(d) / g^2) - pi K0(m_b d), finite at d = 0.
double infinite_smooth(double d, double sigma, const ModelParams& p) {
    const auto c = expansion_coefficients(p);
    double out = 0.0;
    for (int n = 3; n <= 6; ++n) out += c[n - 2] * radial_transform_power(n, d, p.m_b);
    auto j = [d](double r) { return 2.0 * kPi * r * bessel_j0(r * d); };
    if (sigma > 0.0)
        out -= oscillatory_integral([&](double r) { return j(r) * model_f(r, p, c); }, 0.0, sigma, d, fine_scale(p));
    const double reach = 50.0 * std::max({1.0, p.m_b, p.m_p, sigma});
    out += oscillatory_integral([&](double r) { return j(r) * (integrand_f(r, p) - model_f(r, p, c)); }, sigma,
                                sigma + reach, d, fine_scale(p));
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

double truncated_symbol(double r, double m_p, double eps, int panels) {
    if (!(eps > 0.0)) throw std::invalid_argument("truncated_symbol: eps must be positive");
    if (r == 0.0) return 0.0;
    const int n = std::max(panels, static_cast<int>(std::ceil(r * eps / 2.0)));
    auto short_jumps = [&](double s) {
        return one_minus_j0(r * s) * std::exp(-m_p * s) * (m_p * s + 1.0) / (s * s);
    };
    return psi_of(r, m_p) - integrate_panels(short_jumps, 0.0, eps, n, 16);
}

std::vector<double> truncated_symbol_table(const KGrid& grid, double eps, int panels) {
    std::vector<double> out(grid.n_radial());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = truncated_symbol(grid.radii()[i], grid.params().m_p, eps, panels);
    return out;
}

double radial_transform_power(int n, double d, double m_b) {
    if (n < 2) throw std::invalid_argument("radial_transform_power: n must be >= 2");
    if (!(m_b > 0.0)) throw std::invalid_argument("radial_transform_power: m_b must be positive");
    const double nu = 0.5 * n - 1.0;
    if (n == 2) {
        if (d == 0.0) return kInf;
        return 2.0 * kPi * boost::math::cyl_bessel_k(0, m_b * d);
    }
    const double z = m_b * d;
    if (z < 1e-8) return kPi / (nu * std::pow(m_b, 2.0 * nu));
    return 2.0 * kPi * std::pow(d, nu) * boost::math::cyl_bessel_k(nu, z) /
           (std::pow(2.0 * m_b, nu) * std::tgamma(nu + 1.0));
}

double pair_potential_radial(double d, double sigma, double lambda, const ModelParams& params) {
    if (!(sigma >= 0.0) || !(lambda > sigma)) throw std::invalid_argument("pair_potential: need 0 <= sigma < lambda");
    if (!(d >= 0.0)) throw std::invalid_argument("pair_potential: negative distance");
    const double g2 = params.g2();
    if (std::isfinite(lambda)) {
        auto f = [&](double r) { return 2.0 * kPi * r * bessel_j0(r * d) * integrand_f(r, params); };
        return g2 * oscillatory_integral(f, sigma, lambda, d, fine_scale(params));
    }
    if (d == 0.0) return 0.0;
    return g2 * (kPi * boost::math::cyl_bessel_k(0, params.m_b * d) + infinite_smooth(d, sigma, params));
}

double pair_potential(const Vec2& y, double sigma, double lambda, const ModelParams& params) {
    return pair_potential_radial(y.norm(), sigma, lambda, params);
}

PairPotentialTable::PairPotentialTable(const ModelParams& params, double sigma, double lambda, double d_max,
                                       double step, const std::string& cache_dir)
    : params_(params), sigma_(sigma), lambda_(lambda) {
    if (!(sigma >= 0.0) || !(lambda > sigma)) throw std::invalid_argument("PairPotentialTable: need sigma < lambda");
    if (!std::isfinite(lambda) && !(params.m_b > 0.0))
        throw std::invalid_argument("PairPotentialTable: lambda = inf needs m_b > 0");
    step_ = step > 0.0 ? step : (std::isfinite(lambda) ? std::min(0.01, 0.1 / lambda) : 0.01);
    if (d_max <= 0.0) {
        d_max = std::isfinite(lambda) ? 30.0 : std::clamp(30.0 / params.m_b, 20.0, 60.0);
        d_max = std::min(d_max, 4000.0 * step_);
    }
    const int n = static_cast<int>(std::ceil(d_max / step_)) + 1;
    d_max_ = (n - 1) * step_;

    std::string path;
    if (!cache_dir.empty()) {
        char key[256];
        std::snprintf(key, sizeof key, "w|%.17g|%.17g|%.17g|%.17g|%.17g|%d", params.m_p, params.m_b, sigma, lambda,
                      step_, n);
        char name[64];
        std::snprintf(name, sizeof name, "w_%016llx.bin", static_cast<unsigned long long>(fnv1a(key)));
        path = (std::filesystem::path(cache_dir) / name).string();
        std::ifstream in(path, std::ios::binary);
        std::int64_t count = 0;
        if (in && in.read(reinterpret_cast<char*>(&count), sizeof count) && count == n) {
            table_.resize(n);
            in.read(reinterpret_cast<char*>(table_.data()), n * sizeof(double));
            in.read(reinterpret_cast<char*>(&interp_err_), sizeof(double));
            if (in) {
                from_cache_ = true;
                return;
            }
        }
    }

    table_.resize(n);
    for (int i = 0; i < n; ++i) table_[i] = smooth_part(i * step_);
    // Midpoint check against direct quadrature.
    const int checks = std::min(n - 1, 64);
    for (int k = 0; k < checks; ++k) {
        const double d = (static_cast<double>(k) * (n - 1) / checks + 0.5) * step_;
        double t;
        const int i0 = stencil(d / step_, n, t);
        double l[4];
        lagrange4(t, l);
        double v = 0.0;
        for (int a = 0; a < 4; ++a) v += l[a] * table_[i0 + a];
        interp_err_ = std::max(interp_err_, params.g2() * std::fabs(v - smooth_part(d)));
    }
    if (!path.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cache_dir, ec);
        std::ofstream out(path, std::ios::binary);
        const std::int64_t count = n;
        out.write(reinterpret_cast<const char*>(&count), sizeof count);
        out.write(reinterpret_cast<const char*>(table_.data()), n * sizeof(double));
        out.write(reinterpret_cast<const char*>(&interp_err_), sizeof(double));
    }
}

double PairPotentialTable::singular_part(double d) const {
    return std::isfinite(lambda_) ? 0.0 : kPi * boost::math::cyl_bessel_k(0, params_.m_b * d);
}

double PairPotentialTable::smooth_part(double d) const {
    ModelParams unit = params_;
    unit.g = 1.0;
    if (std::isfinite(lambda_)) return pair_potential_radial(d, sigma_, lambda_, unit);
    return infinite_smooth(d, sigma_, unit);
}

double PairPotentialTable::operator()(double d) const {
    if (!std::isfinite(lambda_) && d == 0.0) return 0.0;
    if (d >= d_max_) return pair_potential_radial(d, sigma_, lambda_, params_);
    double t;
    const int i0 = stencil(d / step_, static_cast<int>(table_.size()), t);
    double l[4];
    lagrange4(t, l);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += l[a] * table_[i0 + a];
    return params_.g2() * (singular_part(d) + v);
}

SegmentKernel::SegmentKernel(const ModelParams& params, double sigma, double lambda, double d_max,
                             double resolution)
    : params_(params), sigma_(sigma), lambda_(lambda), d_max_(d_max) {
    if (!(sigma >= 0.0) || !(lambda > sigma) || !std::isfinite(lambda))
        throw std::invalid_argument("SegmentKernel: need 0 <= sigma < lambda < inf");
    if (!(params.m_b > 0.0)) throw std::invalid_argument("SegmentKernel: m_b must be positive");
    if (!(resolution > 0.0)) throw std::invalid_argument("SegmentKernel: resolution must be positive");
    const double width = std::min(2.0, 6.0 / d_max) / resolution;
    const int panels = std::max(2, static_cast<int>(std::ceil((lambda - sigma) / width)));
    append_panels(sigma, lambda, panels, 16, r_, wr_);
    const int nr = static_cast<int>(r_.size());
    om_.resize(nr);
    for (int k = 0; k < nr; ++k) om_[k] = omega_of(r_[k], params.m_b);

    const double w0 = omega_of(sigma, params.m_b);
    tau_max_ = std::log(2.0 * kPi * 1e14 / w0) / w0;
    hd_ = std::min(0.01, 0.05 / lambda) / resolution;
    nd_ = static_cast<int>(std::ceil(d_max / hd_)) + 1;
    d_max_ = (nd_ - 1) * hd_;
    const double u_max = std::log1p(tau_max_ * lambda);
    hu_ = 0.015 / resolution;
    nu_ = static_cast<int>(std::ceil(u_max / hu_)) + 1;

    Eigen::MatrixXd jm(nd_, nr);
    for (int i = 0; i < nd_; ++i)
        for (int k = 0; k < nr; ++k) jm(i, k) = 2.0 * kPi * wr_[k] * r_[k] * bessel_j0(i * hd_ * r_[k]);
    Eigen::VectorXd inv2(nr);
    Eigen::MatrixXd decay(nr, nu_);
    for (int k = 0; k < nr; ++k) {
        inv2(k) = 1.0 / (om_[k] * om_[k]);
        for (int j = 0; j < nu_; ++j) {
            const double tau = std::expm1(j * hu_) / lambda;
            decay(k, j) = std::exp(-tau * om_[k]) / (om_[k] * om_[k] * om_[k]);
        }
    }
    Eigen::VectorXd s = jm * inv2;
    stat_.assign(s.data(), s.data() + nd_);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m = jm * decay;
    mem_.assign(m.data(), m.data() + static_cast<std::size_t>(nd_) * nu_);
}

double SegmentKernel::exact_static_part(double d) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < r_.size(); ++k) acc += wr_[k] * r_[k] * bessel_j0(d * r_[k]) / (om_[k] * om_[k]);
    return 2.0 * kPi * acc;
}

double SegmentKernel::exact_memory_part(double d, double tau) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < r_.size(); ++k)
        acc += wr_[k] * r_[k] * bessel_j0(d * r_[k]) * std::exp(-tau * om_[k]) / (om_[k] * om_[k] * om_[k]);
    return 2.0 * kPi * acc;
}

double SegmentKernel::static_part(double d) const {
    if (d >= d_max_) return exact_static_part(d);
    double t;
    int idx[4];
    even_stencil(d / hd_, nd_, t, idx);
    double l[4];
    lagrange4(t, l);
    return l[0] * stat_[idx[0]] + l[1] * stat_[idx[1]] + l[2] * stat_[idx[2]] + l[3] * stat_[idx[3]];
}

double SegmentKernel::memory_part(double d, double tau) const {
    if (tau >= tau_max_) return 0.0;
    if (d >= d_max_) return exact_memory_part(d, tau);
    double td, tu;
    int idx[4];
    even_stencil(d / hd_, nd_, td, idx);
    const int j0 = stencil(std::log1p(tau * lambda_) / hu_, nu_, tu);
    double ld[4], lu[4];
    lagrange4(td, ld);
    lagrange4(tu, lu);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double* row = &mem_[static_cast<std::size_t>(idx[a]) * nu_ + j0];
        v += ld[a] * (lu[0] * row[0] + lu[1] * row[1] + lu[2] * row[2] + lu[3] * row[3]);
    }
    return v;
}

}  // namespace nelson2d
