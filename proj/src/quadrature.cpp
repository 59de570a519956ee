#include "nelson2d/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace nelson2d {

namespace {

template <int N>
GaussRule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto a = G::abscissa();
    const auto w = G::weights();
    GaussRule r;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static const GaussRule r8 = make_rule<8>();
    static const GaussRule r16 = make_rule<16>();
    static const GaussRule r32 = make_rule<32>();
    switch (n) {
        case 8: return r8;
        case 16: return r16;
        case 32: return r32;
        default: throw std::invalid_argument("gauss_legendre: unsupported order " + std::to_string(n));
    }
}

double integrate_panels(const std::function<double(double)>& f, double a, double b, int n_panels,
                        int order) {
    const GaussRule& g = gauss_legendre(order);
    const double h = (b - a) / n_panels;
    double sum = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(mid + 0.5 * h * g.x[i]);
        sum += 0.5 * h * s;
    }
    return sum;
}

void append_panels(double a, double b, int n_panels, int order, std::vector<double>& nodes,
                   std::vector<double>& weights) {
    const GaussRule& g = gauss_legendre(order);
    const double h = (b - a) / n_panels;
    for (int p = 0; p < n_panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            nodes.push_back(mid + 0.5 * h * g.x[i]);
            weights.push_back(0.5 * h * g.w[i]);
        }
    }
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double* error) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 30, rel_tol,
                                                                                   &err, &l1);
    if (error) *error = err;
    if (!std::isfinite(v)) throw std::runtime_error("integrate_adaptive: non-finite result");
    return v;
}

}  // namespace nelson2d
