#pragma once

#include "nelson2d/types.hpp"

namespace nelson2d {

struct ModelParams {
    int n_particles = 1;
    double m_p = 1.0;
    double m_b = 1.0;
    double g = 1.0;
    double sigma = 0.0;
    double lambda = kInf;

    // Throws std::invalid_argument on violation.  Bounds code evaluates some
    // formulas at m_b = 0 and passes allow_massless.
    void validate(bool allow_massless = false) const;
    double g2() const { return g * g; }
};

struct Dispersion {
    double psi;
    double omega;
};

inline double omega_of(double r, double m_b) { return std::sqrt(r * r + m_b * m_b); }

// sqrt(r^2 + m^2) - m written without cancellation.
inline double psi_of(double r, double m_p) {
    if (m_p == 0.0) return r;
    return r * r / (std::sqrt(r * r + m_p * m_p) + m_p);
}

inline Dispersion dispersion(double r, const ModelParams& p) { return {psi_of(r, p.m_p), omega_of(r, p.m_b)}; }
inline Dispersion dispersion(const Vec2& k, const ModelParams& p) { return dispersion(k.norm(), p); }

// Coupling g / sqrt(omega) and beta = v / (omega + psi).
inline double coupling_v(double r, const ModelParams& p) { return p.g / std::sqrt(omega_of(r, p.m_b)); }
inline double beta_of(double r, const ModelParams& p) {
    const double w = omega_of(r, p.m_b);
    return p.g / (std::sqrt(w) * (w + psi_of(r, p.m_p)));
}

}  // namespace nelson2d
