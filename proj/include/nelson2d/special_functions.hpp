#pragma once

#include "nelson2d/types.hpp"

namespace nelson2d {

// Bessel function of the first kind, order zero.  Power series below 8,
// Chebyshev fits of the Hankel modulus terms P, Q above.
double bessel_j0(double r);

// 1 - J0(r) without cancellation for small r.
double one_minus_j0(double r);

// Modified Bessel function of the third kind.  Only order 3/2 is supported.
double bessel_k(double order, double x);
double bessel_k32(double x);

// Density of the Levy measure of the 2D relativistic process (zero at y = 0).
double levy_jump_density(const Vec2& y, double m_p);
double levy_jump_density_radial(double r, double m_p);

// nu(|y| > eps), closed form exp(-m_p eps)/eps.
double levy_tail_mass(double eps, double m_p);

// Per-axis variance rate of the jumps below eps: (1/2) int_{|y|<=eps} |y|^2 dnu.
double levy_small_jump_variance(double eps, double m_p);

// Density of X_t for the 2D process started at 0.
double marginal_density(const Vec2& y, double t, double m_p);
double marginal_density_radial(double r, double t, double m_p);

// P(|X_t| <= a).
double marginal_radial_cdf(double a, double t, double m_p);

// L^p norm of the near part chi e^{L|y|} rho_t, where chi is the indicator of
// m_p sqrt(t^2 + |y|^2) <= 1.  Needs 0 <= L < m_p and m_p t < 1.
double density_split_norm(double L, double m_p, double t, double p);

}  // namespace nelson2d
