#pragma once

#include <memory>
#include <vector>

#include "nelson2d/levy_path.hpp"
#include "nelson2d/params.hpp"

namespace nelson2d {

struct GridSpec {
    int radial_panels = 0;    // 0: chosen from extent
    int radial_order = 16;    // Gauss-Legendre points per panel
    int angular = 0;          // 0: chosen from extent; rounded up to a multiple of 4
    double r_max = 0.0;       // truncation for lambda = inf; 0: 64 max(1, m_b)
    double extent = 4.0;      // largest |y| for which e^{ik.y} must be resolved
};

// Polar tensor grid on the annulus lo <= |k| <= hi: Gauss-Legendre panels in r,
// uniform trapezoid in theta.  Index i = ir * n_theta + it.
class KGrid {
public:
    KGrid(const ModelParams& params, double lo, double hi, const GridSpec& spec);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool truncated() const { return truncated_; }
    std::size_t n_radial() const { return r_.size(); }
    std::size_t n_theta() const { return cos_.size(); }
    std::size_t size() const { return r_.size() * cos_.size(); }

    const std::vector<double>& radii() const { return r_; }
    // r dr weights times the angular step; sum over theta of the 2D weight.
    const std::vector<double>& radial_area_weights() const { return area_r_; }
    double dtheta() const { return dtheta_; }
    double cos_theta(std::size_t it) const { return cos_[it]; }
    double sin_theta(std::size_t it) const { return sin_[it]; }
    const ModelParams& params() const { return params_; }

    // Per-radius tables.
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& psi() const { return psi_; }
    const std::vector<double>& v() const { return v_; }
    const std::vector<double>& beta() const { return beta_; }

    // Fills out[i] = e^{-i k.p} for all grid points.
    void plane_wave(const Vec2& p, std::vector<cplx>& out) const;

    bool same_as(const KGrid& o) const;

private:
    ModelParams params_;
    double lo_, hi_;
    bool truncated_ = false;
    std::vector<double> r_, area_r_, omega_, psi_, v_, beta_;
    std::vector<double> cos_, sin_;
    double dtheta_ = 0.0;
};

using GridPtr = std::shared_ptr<const KGrid>;

GridPtr make_grid(const ModelParams& params, double lo, double hi, const GridSpec& spec);

// Complex function of k sampled on a KGrid.  Radial-only functions store one
// value per radius.
class FieldFunction {
public:
    FieldFunction() = default;
    static FieldFunction zeros(GridPtr grid);
    static FieldFunction radial(GridPtr grid, std::vector<cplx> values);
    static FieldFunction full(GridPtr grid, std::vector<cplx> values);

    const GridPtr& grid() const { return grid_; }
    bool radial_only() const { return radial_only_; }
    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }
    cplx at(std::size_t ir, std::size_t it) const;

    // Expands a radial-only function to full storage.
    FieldFunction expanded() const;

    FieldFunction& operator+=(const FieldFunction& o);
    FieldFunction& operator-=(const FieldFunction& o);
    FieldFunction& operator*=(cplx s);
    // Pointwise product with a radial real table indexed by ir.
    FieldFunction times_radial(const std::vector<double>& f) const;

private:
    GridPtr grid_;
    bool radial_only_ = false;
    std::vector<cplx> values_;
};

// Conjugate-linear in the first slot.
cplx inner(const FieldFunction& a, const FieldFunction& b);
double l2_norm(const FieldFunction& f);
// ||f||_t^2 = int (1 + 1/(t omega)) |f|^2 dk
double t_norm(const FieldFunction& f, double t);
// ||omega f||_t
double t_norm_omega(const FieldFunction& f, double t);

// Residual of the real-symmetry f(-k) = conj f(k) over mirror grid pairs.
double real_symmetry_residual(const FieldFunction& f);

FieldFunction coupling_field(GridPtr grid);       // v restricted to the grid annulus
FieldFunction beta_field(GridPtr grid);           // beta restricted to the grid annulus
FieldFunction decayed_coupling(GridPtr grid, double s);  // e^{-s omega} v

// E^ren_{sigma,Lambda} by adaptive quadrature; lambda = inf is rejected.
double renorm_energy(double sigma, double lambda, const ModelParams& params);

enum class USign { plus, minus };

// U^{N,+/-}_{sigma,Lambda,t}[x, path] on the grid annulus; closed-form time
// integration over each constant segment.
FieldFunction u_process(USign sign, const std::vector<Vec2>& x, const LevyPath& path, double t,
                        GridPtr grid);

// Incremental evolution of U^{N,+} (and U^{N,-}) along a piecewise-constant path.
class FieldEvolver {
public:
    FieldEvolver(GridPtr grid, const std::vector<Vec2>& x, bool track_minus = true);

    double time() const { return time_; }
    const std::vector<Vec2>& positions() const { return pos_; }
    const std::vector<cplx>& u_plus() const { return up_; }
    const std::vector<cplx>& u_minus() const { return um_; }
    // sum_j e^{-i k.X_j} (without the coupling factor)
    const std::vector<cplx>& phase_sum() const { return phase_sum_; }
    const std::vector<cplx>& phase(int j) const { return phases_[j]; }

    // Advances to time s with positions frozen; optionally accumulates
    // int <U^+_r | phase_sum * weight> dr for the listed radial weights.
    void advance(double s);
    void integrate_then_advance(double s, const std::vector<const std::vector<double>*>& weights,
                                std::vector<cplx>& integrals);
    // Moves one particle.  With a weight, returns <U^+ | (e^{-ik.new} - e^{-ik.old}) weight>
    // evaluated before the move (U^+ is continuous in time).
    cplx move(int particle, const Vec2& jump, const std::vector<double>* weight = nullptr);
    // <U^+ | weight * phase_sum>
    cplx overlap(const std::vector<double>& weight) const;

    FieldFunction plus_field() const;
    FieldFunction minus_field() const;

private:
    GridPtr grid_;
    bool track_minus_;
    double time_ = 0.0;
    std::vector<Vec2> pos_;
    std::vector<std::vector<cplx>> phases_;
    std::vector<cplx> phase_sum_, up_, um_;
};

}  // namespace nelson2d
