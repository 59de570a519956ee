#pragma once

#include <string>
#include <vector>

#include "nelson2d/params.hpp"

namespace nelson2d {

// Constants the bounds leave unspecified; every default is 1 except where a
// range restriction forces otherwise.
struct BoundConstants {
    double b = 1.0;         // small-coupling lower bound, exponential-moment prefactor
    double b_prime = 1.0;   // small-coupling lower bound, interaction part
    double c = 1.0;         // large-coupling lower bound g^2 N^2 term; moment exponent
    double c_prime = 1.0;   // (N - 1) m_p term; moment exponent
    double c_upper = 1.0;   // upper bound (N - 1) m_p term
    double c_theta = 1.0;   // upper bound g^2 N^2 coefficient C(theta, m_p, 1 v m_b)
    double c_star = 2.0;    // > 1, trial bound at the scale Lambda_{g,N}
    double alpha = 2.0;     // > 1
    double theta = 0.9;     // in (0, 1)
    double s = 1.0;         // trial-state scale
    double eps = 0.5;       // in (0, 1), trial bound at the scale Lambda_{g,N}

    void validate() const;
};

enum class LowerBoundVariant { small_coupling, large_coupling, large_coupling_massive };

// Lower bounds on the minimal energy for V = 0.
double lower_bound(const ModelParams& params, const BoundConstants& k, LowerBoundVariant variant);

// Uniform-in-m_b lower bound for N = 1, m_p > 0.
double single_particle_lower_bound(double g, double m_p, double c);

enum class MomentBound { u1, u2 };

// Right-hand sides of the exponential-moment bounds on E[sup_{s<=t} e^{p u_s}].
// u2 with m_p > 0 uses the three-term exponent.
double exp_moment_bound(const ModelParams& params, const BoundConstants& k, double p, double t, MomentBound which);
double log_exp_moment_bound(const ModelParams& params, const BoundConstants& k, double p, double t,
                            MomentBound which);

// sqrt(pi s / 2) g^2 N^2 - g^2 N^2 int_{sigma<|k|<lambda} e^{-|k|^2/(4 s g^4 N^2)} / (|k|^2 + m_b^2) dk.
// Finite lambda only; m_b = 0 is allowed when sigma > 0.
double trial_upper_bound(const ModelParams& params, double s, double sigma, double lambda);

// Smallest trial bound over a grid of scales s.
struct TrialOptimum {
    double s = 0.0;
    double value = 0.0;
};
TrialOptimum best_trial_scale(const ModelParams& params, double sigma, double lambda, const std::vector<double>& s_grid);

// sqrt(g^4 N^2 - m_b^2); requires g^2 N > m_b.
double trial_cutoff(const ModelParams& params);

// Right side of the bound on the trial energy plus N E^ren at the cutoff trial_cutoff.
double trial_bound_at_scale_rhs(const ModelParams& params, const BoundConstants& k);

// Upper bound on the renormalized minimal energy; requires g^2 N > sqrt(2) m_b.
double renormalized_upper_bound(const ModelParams& params, const BoundConstants& k);

enum class AsymptoticRegime { particles, coupling, boson_mass_massive, boson_mass_massless };

struct AsymptoticRow {
    double x = 0.0;
    double upper_ratio = 0.0;
    double lower_ratio = 0.0;
};

struct AsymptoticTable {
    AsymptoticRegime regime = AsymptoticRegime::particles;
    double target = 0.0;
    std::vector<AsymptoticRow> rows;
};

// Grid values are N, g^2 or m_b depending on the regime.  The lower bound uses the
// massive variant whenever m_p > 0.
AsymptoticTable asymptotic_table(AsymptoticRegime regime, const std::vector<double>& grid, const ModelParams& base,
                                 const BoundConstants& k);
double asymptotic_target(AsymptoticRegime regime, const ModelParams& base);

AsymptoticRegime parse_regime(const std::string& name);
std::string regime_name(AsymptoticRegime regime);

}  // namespace nelson2d
