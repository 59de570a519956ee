#pragma once

#include <vector>

#include "nelson2d/action.hpp"
#include "nelson2d/kspace.hpp"
#include "nelson2d/potential.hpp"
#include "nelson2d/rng.hpp"

namespace nelson2d {

// e^{log_amplitude} times the exponential vector of profile.
struct CoherentState {
    cplx log_amplitude = 0.0;
    FieldFunction profile;

    static CoherentState vacuum(GridPtr grid);
};

// A e^{-|k|^2 width^2 / 2} e^{-ik.center}; real-symmetric.
FieldFunction gaussian_profile(GridPtr grid, double amplitude, double width, const Vec2& center = {});

// W_t[x, path] applied to state: profile e^{-t omega} h - U^+, log-amplitude
// shifted by u - int V - <U^- | h>.
CoherentState apply_W(const std::vector<Vec2>& x, const LevyPath& path, double t, double action_u,
                      double potential_integral, const CoherentState& state);

cplx log_coherent_inner(const CoherentState& a, const CoherentState& b);
cplx coherent_inner(const CoherentState& a, const CoherentState& b);

struct FlowResiduals {
    double r2 = 0.0;  // U^- flow, grid L2 norm of the difference
    double r3 = 0.0;  // U^+ flow
    double r4 = 0.0;  // scalar action flow
};

// Splits the path at t and compares the composed pieces on [0, t + s].  The
// action identity uses the position-space engine when a kernel is given
// (independent of the grid), and the grid otherwise.
FlowResiduals flow_check(const std::vector<Vec2>& x, const LevyPath& path, double t, double s, const GridPtr& grid,
                         const SegmentKernel* kernel = nullptr);

struct GeneratorResidual {
    double residual = 0.0;  // sup over the ladder
    double at_time = 0.0;
    int ladder_points = 0;
};

// Sup over a ladder of spacing step (plus the event times) of
// |<e(h1)|W_s e(h2)> - <e(h1)|e(h2)> + int_0^s <(dGamma(omega) + sum phi + V + N E^ren) e(h1)|W_r e(h2)> dr|
// with the r-integral by the left-endpoint rule.  Finite cutoff only.
GeneratorResidual generator_residual(const std::vector<Vec2>& x, const LevyPath& path, double t, const GridPtr& grid,
                                     const FieldFunction& h1, const FieldFunction& h2, const PotentialSpec& v,
                                     double step);

// Product of normalized-shape Gaussians exp(-|x_j - c_j|^2 / (2 width^2)).
struct Wavepacket {
    std::vector<Vec2> centers;
    double width = 1.0;

    double operator()(const std::vector<Vec2>& x) const;
    double l1_norm() const;
    std::vector<Vec2> sample(RngStream& rng) const;
};

struct SymmetryOptions {
    double epsilon = 0.1;
    bool gaussian_correction = true;
    int n_paths = 1000;
};

struct SymmetryResult {
    cplx forward = 0.0;   // <Psi'|T_t Psi>
    cplx backward = 0.0;  // <Psi|T_t Psi'>
    double forward_err = 0.0;
    double backward_err = 0.0;
};

// Monte Carlo estimates for Psi = f (x) e(h), Psi' = f' (x) e(h').  Selfadjointness
// predicts forward = conj(backward).
SymmetryResult semigroup_symmetry(const Wavepacket& f, const Wavepacket& f2, const FieldFunction& h,
                                  const FieldFunction& h2, const PotentialSpec& v, double t, const RngStream& rng,
                                  const SymmetryOptions& opts = {});

}  // namespace nelson2d
