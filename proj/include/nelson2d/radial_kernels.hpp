#pragma once

#include <string>
#include <vector>

#include "nelson2d/kspace.hpp"
#include "nelson2d/params.hpp"

namespace nelson2d {

// psi restricted to jumps longer than eps: int_{|z|>eps} (1 - cos k.z) dnu(z),
// computed as psi(r) minus the short-jump part by Gauss-Legendre panels on [0, eps].
double truncated_symbol(double r, double m_p, double eps, int panels = 8);
std::vector<double> truncated_symbol_table(const KGrid& grid, double eps, int panels = 8);

// 2 pi int_0^inf r J0(r d) omega^{-n} dr for n >= 2 (closed forms in K_{n/2-1}).
double radial_transform_power(int n, double d, double m_b);

// w_{sigma,Lambda}(|y|) = g^2 int_sigma^Lambda 2 pi r J0(r|y|) / (omega (omega + psi)) dr.
// For lambda = inf the first five terms of the large-r expansion are transformed in
// closed form and only the remainder is integrated; w(0) = 0 by convention there.
double pair_potential(const Vec2& y, double sigma, double lambda, const ModelParams& params);
double pair_potential_radial(double d, double sigma, double lambda, const ModelParams& params);

// Cubic interpolation table of w in |y|, exact evaluation beyond d_max.  The
// logarithmic singularity at 0 (lambda = inf) is kept analytic.
class PairPotentialTable {
public:
    PairPotentialTable(const ModelParams& params, double sigma, double lambda, double d_max = 0.0,
                       double step = 0.0, const std::string& cache_dir = "");

    double operator()(double d) const;
    double operator()(const Vec2& y) const { return (*this)(y.norm()); }
    double sigma() const { return sigma_; }
    double lambda() const { return lambda_; }
    double d_max() const { return d_max_; }
    // Largest deviation from direct quadrature seen at interval midpoints during the build.
    double interpolation_error() const { return interp_err_; }
    bool loaded_from_cache() const { return from_cache_; }

private:
    double smooth_part(double d) const;  // w/g^2 without the singular term
    double singular_part(double d) const;

    ModelParams params_;
    double sigma_, lambda_, d_max_, step_;
    std::vector<double> table_;
    double interp_err_ = 0.0;
    bool from_cache_ = false;
};

// Position-space kernels for finite lambda (g^2 factored out):
//   static_part(d)      = 2 pi int r J0(r d) / omega^2 dr
//   memory_part(d, tau) = 2 pi int r J0(r d) e^{-tau omega} / omega^3 dr
// over sigma <= r <= lambda.  Tables in (d, log(1 + tau lambda)) with 4x4 Lagrange
// interpolation; exact radial sums beyond the table.
class SegmentKernel {
public:
    SegmentKernel(const ModelParams& params, double sigma, double lambda, double d_max = 40.0,
                  double resolution = 1.0);

    double static_part(double d) const;
    double memory_part(double d, double tau) const;
    double exact_static_part(double d) const;
    double exact_memory_part(double d, double tau) const;
    // memory_part vanishes below double precision beyond this lag.
    double tau_max() const { return tau_max_; }
    double sigma() const { return sigma_; }
    double lambda() const { return lambda_; }
    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    double sigma_, lambda_, d_max_, tau_max_;
    double hd_, hu_;
    int nd_, nu_;
    std::vector<double> r_, wr_, om_;
    std::vector<double> stat_, mem_;  // mem_[id * nu_ + iu]
};

}  // namespace nelson2d
