#include "nelson2d/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nelson2d/kspace.hpp"
#include "nelson2d/quadrature.hpp"

namespace nelson2d {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

double count(const ModelParams& p) { return static_cast<double>(p.n_particles); }

}  // namespace

void BoundConstants::validate() const {
    if (!(b > 0.0 && b_prime >= 0.0 && c >= 0.0 && c_prime >= 0.0 && c_upper >= 0.0 && c_theta >= 0.0))
        throw std::invalid_argument("bound constants must be non-negative (b positive)");
    if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    if (!(c_star > 1.0)) throw std::invalid_argument("c_star must exceed 1");
}

double lower_bound(const ModelParams& p, const BoundConstants& k, LowerBoundVariant variant) {
    p.validate();
    k.validate();
    const double n = count(p), g2 = p.g2(), mb = p.m_b, mp = p.m_p;
    switch (variant) {
        case LowerBoundVariant::small_coupling:
            return -k.b * g2 * g2 * n * n * n / mb * std::exp(8.0 * kPi * g2 * n / mb) -
                   k.b_prime * g2 * g2 * n * n * (n - 1.0) / mb * (1.0 + mp / mb);
        case LowerBoundVariant::large_coupling: {
            require(g2 * n >= mb, "lower_bound: large-coupling form needs g^2 N >= m_b");
            const double lead = kPi * g2 * (2.0 * n * n - n) * std::log(g2 * n / mb);
            return -lead - k.c * g2 * n * n - k.c_prime * (n - 1.0) * mp;
        }
        case LowerBoundVariant::large_coupling_massive: {
            require(g2 * n >= mb, "lower_bound: large-coupling form needs g^2 N >= m_b");
            require(mp > 0.0, "lower_bound: massive form needs m_p > 0");
            const double lead = 2.0 * kPi * g2 * n * (n - 1.0) * std::log(g2 * n / mb) +
                                kPi * g2 * n * std::log(std::max(1.0, g2 * n)) +
                                kPi * g2 * n / mp * std::min(g2 * n, 1.0);
            return -lead - k.c * g2 * n * n - k.c_prime * (n - 1.0) * mp;
        }
    }
    throw std::logic_error("lower_bound: unknown variant");
}

double single_particle_lower_bound(double g, double m_p, double c) {
    if (!(m_p > 0.0)) throw std::domain_error("single_particle_lower_bound: needs m_p > 0");
    const double g2 = g * g;
    return -kPi * g2 * std::log(std::max(g2, 1.0)) - kPi * g2 / m_p * std::min(g2, 1.0) - c * g2;
}

double log_exp_moment_bound(const ModelParams& p, const BoundConstants& k, double pw, double t, MomentBound which) {
    p.validate();
    k.validate();
    if (!(pw > 0.0) || !(t >= 0.0)) throw std::invalid_argument("exp_moment_bound: need p > 0 and t >= 0");
    const double n = count(p), g2 = p.g2(), mb = p.m_b, mp = p.m_p, a = k.alpha;
    const double pre = n * std::log(k.b) + 0.5 * std::log(a / (a - 1.0));
    if (which == MomentBound::u1) {
        const double g4 = g2 * g2;
        return pre + 2.0 * kPi * pw * n * n * g2 / mb +
               t * k.c_prime * pw * pw * g4 * n * n * (n - 1.0) / mb * (1.0 + mp / mb) +
               t * k.c * a * pw * pw * g4 * n * n * n / mb * std::exp(8.0 * kPi * a * pw * g2 * n / mb);
    }
    const double pg = pw * g2 * n;
    require(pg > mb, "exp_moment_bound: second form needs p g^2 N > m_b");
    double lead;
    if (mp > 0.0)
        lead = 2.0 * kPi * pw * g2 * n * (n - 1.0) * std::log(pg / mb) + kPi * pg * std::max(std::log(pg), 0.0) +
               kPi * g2 * n / mp * std::min(pg, 1.0);
    else
        lead = kPi * pw * g2 * (2.0 * n * n - n) * std::log(pg / mb);
    return pre + t * lead + t * k.c_prime * (n - 1.0) * (mp + pg) +
           t * k.c * a * pw * g2 * n * n * std::exp(8.0 * kPi * a);
}

double exp_moment_bound(const ModelParams& p, const BoundConstants& k, double pw, double t, MomentBound which) {
    return std::exp(log_exp_moment_bound(p, k, pw, t, which));
}

double trial_upper_bound(const ModelParams& p, double s, double sigma, double lambda) {
    p.validate(true);
    if (!(s > 0.0)) throw std::invalid_argument("trial_upper_bound: s must be positive");
    if (!(sigma >= 0.0 && lambda > sigma)) throw std::invalid_argument("trial_upper_bound: need 0 <= sigma < lambda");
    if (!std::isfinite(lambda)) throw std::domain_error("trial_upper_bound: needs a finite cutoff");
    if (p.m_b == 0.0 && !(sigma > 0.0)) throw std::domain_error("trial_upper_bound: m_b = 0 needs sigma > 0");
    const double n = count(p), g2 = p.g2(), mb2 = p.m_b * p.m_b;
    const double scale = 4.0 * s * g2 * g2 * n * n;
    // Radial integral in u = |k|^2: pi int e^{-u/scale} / (u + m_b^2) du.
    const double u_lo = sigma * sigma;
    const double u_hi = std::min(lambda * lambda, u_lo + 800.0 * scale);
    double integral;
    if (mb2 > 0.0) {
        auto f = [&](double u) { return std::exp(-u / scale) / (u + mb2); };
        const double mid = std::clamp(mb2, u_lo, u_hi);
        integral = integrate_adaptive(f, u_lo, mid, 1e-12) + integrate_adaptive(f, mid, u_hi, 1e-12);
    } else {
        auto f = [&](double z) { return std::exp(-std::exp(z) / scale); };
        const double z_lo = std::log(u_lo), z_hi = std::log(u_hi), z_mid = std::clamp(std::log(scale), z_lo, z_hi);
        integral = integrate_adaptive(f, z_lo, z_mid, 1e-12) + integrate_adaptive(f, z_mid, z_hi, 1e-12);
    }
    return std::sqrt(kPi * s / 2.0) * g2 * n * n - g2 * n * n * kPi * integral;
}

TrialOptimum best_trial_scale(const ModelParams& p, double sigma, double lambda, const std::vector<double>& s_grid) {
    if (s_grid.empty()) throw std::invalid_argument("best_trial_scale: empty grid");
    TrialOptimum best{s_grid.front(), trial_upper_bound(p, s_grid.front(), sigma, lambda)};
    for (double s : s_grid) {
        const double v = trial_upper_bound(p, s, sigma, lambda);
        if (v < best.value) best = {s, v};
    }
    return best;
}

double trial_cutoff(const ModelParams& p) {
    const double gn = p.g2() * count(p);
    require(gn > p.m_b, "trial_cutoff: needs g^2 N > m_b");
    return std::sqrt(gn * gn - p.m_b * p.m_b);
}

double trial_bound_at_scale_rhs(const ModelParams& p, const BoundConstants& k) {
    p.validate();
    k.validate();
    const double n = count(p), g2 = p.g2(), gn = g2 * n, s = k.s, mb = p.m_b;
    require(gn > mb, "trial_bound_at_scale_rhs: needs g^2 N > m_b");
    const double damp = std::exp(-1.0 / (4.0 * s));
    double out = std::sqrt(kPi * s / 2.0) * g2 * n * n - 2.0 * kPi * damp * g2 * n * (n - 1.0) * std::log(gn / mb) -
                 kPi * gn * damp * (2.0 - 2.0 * k.eps) / (2.0 - k.eps) * std::max(0.0, std::log(gn / k.c_star)) +
                 kPi / (4.0 * s) * gn;
    if (p.m_p == 0.0) out -= kPi * gn * damp * std::log(std::min(1.0, gn) / (std::exp(1.0) * mb));
    return out;
}

double renormalized_upper_bound(const ModelParams& p, const BoundConstants& k) {
    p.validate();
    k.validate();
    const double n = count(p), g2 = p.g2(), gn = g2 * n, mb = p.m_b, th = k.theta;
    require(gn > std::sqrt(2.0) * mb, "renormalized_upper_bound: needs g^2 N > sqrt(2) m_b");
    double out = k.c_upper * (n - 1.0) * p.m_p + k.c_theta * g2 * n * n -
                 2.0 * kPi * th * g2 * n * (n - 1.0) * std::log(gn / mb) -
                 kPi * th * gn * std::log(std::max(1.0, gn));
    if (p.m_p == 0.0) out -= kPi * th * gn * std::log(std::min(1.0, gn) / mb);
    return out;
}

double asymptotic_target(AsymptoticRegime regime, const ModelParams& p) {
    const double n = count(p), g2 = p.g2();
    switch (regime) {
        case AsymptoticRegime::particles: return -2.0 * kPi * g2;
        case AsymptoticRegime::coupling: return -kPi * (2.0 * n * n - n);
        case AsymptoticRegime::boson_mass_massive: return 2.0 * kPi * g2 * n * (n - 1.0);
        case AsymptoticRegime::boson_mass_massless: return kPi * g2 * (2.0 * n * n - n);
    }
    throw std::logic_error("asymptotic_target: unknown regime");
}

AsymptoticTable asymptotic_table(AsymptoticRegime regime, const std::vector<double>& grid, const ModelParams& base,
                                 const BoundConstants& k) {
    AsymptoticTable out;
    out.regime = regime;
    if (regime == AsymptoticRegime::boson_mass_massive && !(base.m_p > 0.0))
        throw std::domain_error("asymptotic_table: massive boson-mass regime needs m_p > 0");
    if (regime == AsymptoticRegime::boson_mass_massless && base.m_p != 0.0)
        throw std::domain_error("asymptotic_table: massless boson-mass regime needs m_p = 0");
    for (double x : grid) {
        ModelParams p = base;
        double norm;
        switch (regime) {
            case AsymptoticRegime::particles:
                p.n_particles = static_cast<int>(std::llround(x));
                norm = x * x * std::log(x);
                break;
            case AsymptoticRegime::coupling:
                p.g = std::sqrt(x);
                norm = x * std::log(x);
                break;
            default:
                p.m_b = x;
                norm = std::log(x);
                break;
        }
        const auto variant =
            p.m_p > 0.0 ? LowerBoundVariant::large_coupling_massive : LowerBoundVariant::large_coupling;
        AsymptoticRow row;
        row.x = x;
        row.upper_ratio = renormalized_upper_bound(p, k) / norm;
        row.lower_ratio = lower_bound(p, k, variant) / norm;
        out.rows.push_back(row);
    }
    out.target = asymptotic_target(regime, base);
    return out;
}

AsymptoticRegime parse_regime(const std::string& name) {
    if (name == "N" || name == "particles") return AsymptoticRegime::particles;
    if (name == "g" || name == "coupling") return AsymptoticRegime::coupling;
    if (name == "mb-massive") return AsymptoticRegime::boson_mass_massive;
    if (name == "mb-massless") return AsymptoticRegime::boson_mass_massless;
    throw std::invalid_argument("unknown regime '" + name + "' (N, g, mb-massive, mb-massless)");
}

std::string regime_name(AsymptoticRegime regime) {
    switch (regime) {
        case AsymptoticRegime::particles: return "N";
        case AsymptoticRegime::coupling: return "g";
        case AsymptoticRegime::boson_mass_massive: return "mb-massive";
        case AsymptoticRegime::boson_mass_massless: return "mb-massless";
    }
    return "?";
}

}  // namespace nelson2d
