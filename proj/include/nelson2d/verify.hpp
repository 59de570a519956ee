#pragma once

#include <vector>

#include "nelson2d/action.hpp"
#include "nelson2d/bounds.hpp"
#include "nelson2d/estimator.hpp"
#include "nelson2d/fock.hpp"
#include "nelson2d/params.hpp"
#include "nelson2d/rng.hpp"

namespace nelson2d {

// Kolmogorov-Smirnov test of sampled |X_t| against the closed-form radial law.
struct KsResult {
    long n = 0;
    double statistic = 0.0;
    double critical = 0.0;  // asymptotic 1% value 1.6276 / sqrt(n)
    bool pass = false;
};
KsResult radial_law_ks(double t, double m_p, long n, const RngStream& rng);

struct FlowRow {
    long path_id = 0;
    double t = 0.0;
    double s = 0.0;
    long events = 0;
    FlowResiduals residuals;
};

struct FlowSummary {
    std::vector<FlowRow> rows;
    double max_r2 = 0.0, max_r3 = 0.0, max_r4 = 0.0;
};

// Random starts in [-1, 1]^2, jump paths of threshold epsilon on [0, horizon],
// split point t and shifted length s uniform with t + s <= horizon.  The action
// identity uses the position-space kernel.
FlowSummary flow_suite(const ModelParams& params, long n_paths, double horizon, double epsilon, const RngStream& rng,
                       int threads = 1);

struct ItoRow {
    double epsilon = 0.0;
    double mean_abs_diff = 0.0;
    double stderr_ = 0.0;
};

struct ItoSummary {
    std::vector<ItoRow> rows;
    // mean |direct action on the path grid - direct action on the refined grid|
    double quadrature_error = 0.0;
    bool monotone = false;
    bool below_quadrature = false;
    // Per path, epsilons in order; direct_u holds the grid direct action.
    std::vector<ActionParts> parts;
};

struct ItoOptions {
    std::vector<double> epsilons{0.3, 0.1, 0.03};
    long n_paths = 1000;
    double t = 1.0;
    bool gaussian_correction = false;
    double correction_step = 0.05;
    CompensatorMode compensator = CompensatorMode::truncated;
    long quadrature_paths = 20;
    int threads = 1;
};

// mean |direct action - (w - c + m)| on the full annulus (sigma, lambda) per epsilon.
ItoSummary ito_suite(const ModelParams& params, const ItoOptions& opts, const RngStream& rng);

struct GeneratorRow {
    long path_id = 0;
    bool frozen = false;
    double coarse = 0.0;
    double fine = 0.0;
    double ratio = 0.0;
};

struct GeneratorSummary {
    std::vector<GeneratorRow> rows;
    double min_ratio = 0.0, max_ratio = 0.0;
    bool pass = false;  // every ratio within 0.5 +- 20%
};

// Half frozen, half jump paths; residual with ladder spacing step and step / 2.
GeneratorSummary generator_suite(const ModelParams& params, long n_paths, double t, double step, const RngStream& rng,
                                 double epsilon = 0.3);

struct MomentSet {
    ModelParams params;
    double t = 1.0;
};

struct MomentRow {
    MomentSet set;
    double mc = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    bool held_out = false;
    bool respected = false;
};

struct MomentCheck {
    BoundConstants constants;  // calibrated c = c'
    std::vector<MomentRow> rows;
    bool pass = false;
};

// E[sup_{s<=t} e^{p u_s}] against the first exponential-moment bound.  b = 1 and
// alpha from base; c = c' is the smallest value for which the bound covers the
// calibration estimate.  Held-out sets must satisfy mc - 2 stderr <= bound.
MomentCheck exp_moment_check(const MomentSet& calibration, const std::vector<MomentSet>& held_out, double p,
                             long n_paths, const RngStream& rng, const EstimatorOptions& opts,
                             const BoundConstants& base = {}, double sup_step = 0.01);

// Least-squares slope of log(norm) against log(t) on a log-spaced ladder.
double density_norm_exponent(double L, double m_p, double p, double t_lo, double t_hi, int points = 9);

// Least-squares slope of the massless trial bound against ln(sigma).
double trial_bound_log_slope(const ModelParams& params, double s, double lambda, double sigma_lo, double sigma_hi,
                             int points = 9);

// 2 pi g^2 N^2 e^{-sigma^2 / (4 s g^4 N^2)} at the geometric mean of the sigma range.
double trial_bound_slope_prediction(const ModelParams& params, double s, double sigma_lo, double sigma_hi);

}  // namespace nelson2d
