#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nelson2d/kspace.hpp"
#include "nelson2d/levy_path.hpp"
#include "nelson2d/radial_kernels.hpp"

namespace nelson2d {

// Which symbol the martingale compensator integrates against.  truncated: the
// jumps longer than the path's epsilon (plus the Gaussian part when the path
// carries the correction), i.e. the measure the path was sampled from.  full:
// the complete symbol psi, for which w - c + m equals the direct action
// pathwise on every piecewise-constant path.
enum class CompensatorMode { truncated, full };

struct ActionOptions {
    GridSpec grid;  // extent is raised to the path extent automatically
    CompensatorMode compensator = CompensatorMode::truncated;
    int symbol_panels = 8;
    std::string cache_dir;
};

struct ActionParts {
    double w = 0.0;
    double c = 0.0;
    double m = 0.0;
    double u = 0.0;
    double direct_u = std::numeric_limits<double>::quiet_NaN();
    double counter_term = 0.0;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double epsilon = 0.0;
    // Largest imaginary part discarded from c and the jump terms.
    double imag_residual = 0.0;
    // Bound on the omitted momenta above the grid truncation (lambda = inf only).
    double tail_bound = 0.0;
};

// Grid on lo <= |k| <= hi whose angular resolution covers the visited region.
GridPtr grid_for_path(const ModelParams& params, double lo, double hi, const std::vector<Vec2>& x,
                      const LevyPath& path, const GridSpec& spec);

// sum_{j<l} int_0^t 2 w(X_j - X_l) ds, exact per constant segment.
double interaction_term(const std::vector<Vec2>& x, const LevyPath& path, double t, const PairPotentialTable& w);
double interaction_term(const std::vector<Vec2>& x, const LevyPath& path, double t, double sigma, double lambda,
                        const ModelParams& params);

// c = <U^{N,+}_t | beta^N_t> on the grid annulus.
double boundary_term(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid);

struct MartingaleParts {
    double m = 0.0;
    double jump_sum = 0.0;
    double compensator = 0.0;  // int int h dnu ds (so m = jump_sum - compensator)
};
MartingaleParts martingale_term(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid,
                                CompensatorMode mode = CompensatorMode::truncated, int symbol_panels = 8);

// int_0^t <U^{N,+}_s | v^N_s> ds - t N E^ren on a finite annulus.
double direct_action(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid);

// u_{sigma,Lambda} = direct(sigma, kappa) + (w - c + m)(kappa, Lambda), with sigma and
// Lambda taken from params.  Lambda may be infinite.
ActionParts renormalized_action(const std::vector<Vec2>& x, const LevyPath& path, double t,
                                const ModelParams& params, double kappa, const ActionOptions& opts = {});

// max(g^2 N, 2 m_b)
double default_kappa(const ModelParams& params);

// Direct action for finite lambda through position-space kernels: values at the
// requested (sorted) times.  When sup is given it receives the largest value over
// the requested times, all event times, and a ladder of spacing sup_step.
std::vector<double> direct_action_trace(const std::vector<Vec2>& x, const LevyPath& path,
                                        const std::vector<double>& times, const SegmentKernel& kernel,
                                        double* sup = nullptr, double sup_step = 0.0);

std::vector<std::string> action_csv_header();
std::vector<std::string> action_csv_row(long path_id, const ActionParts& parts);

}  // namespace nelson2d
