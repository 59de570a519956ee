#pragma once

#include <functional>
#include <vector>

namespace nelson2d {

// Nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Supported orders: 8, 16, 32.
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre over [a, b] split into n_panels equal panels.
double integrate_panels(const std::function<double(double)>& f, double a, double b, int n_panels,
                        int order = 16);

// Adaptive Gauss-Kronrod; b may be +infinity.  Throws if the tolerance is not met.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double* error = nullptr);

// Appends the nodes/weights of a composite rule over [a, b] to the given vectors.
void append_panels(double a, double b, int n_panels, int order, std::vector<double>& nodes,
                   std::vector<double>& weights);

}  // namespace nelson2d
