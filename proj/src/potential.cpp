#include "nelson2d/potential.hpp"

#include <stdexcept>

namespace nelson2d {

double PotentialSpec::operator()(const std::vector<Vec2>& x) const {
    double v = shift;
    const int n = static_cast<int>(x.size());
    if (site)
        for (int j = 0; j < n; ++j) v += site(j, x[j]);
    if (pair)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) v += pair(i, j, x[i] - x[j]);
    if (callable) v += callable(x);
    return v;
}

PotentialSpec PotentialSpec::shifted(double c) const {
    PotentialSpec out = *this;
    out.shift += c;
    return out;
}

PotentialSpec PotentialSpec::zero() { return {}; }

PotentialSpec PotentialSpec::constant(double c) {
    PotentialSpec out;
    out.shift = c;
    out.label = "constant";
    return out;
}

PotentialSpec PotentialSpec::coulomb_pairs(double strength, double softening) {
    if (!(softening >= 0.0)) throw std::invalid_argument("coulomb_pairs: softening must be >= 0");
    PotentialSpec out;
    out.pair = [strength, softening](int, int, const Vec2& y) {
        const double d = y.norm() + softening;
        return d > 0.0 ? strength / d : kInf;
    };
    out.label = "coulomb_pairs";
    return out;
}

PotentialSpec PotentialSpec::harmonic(double strength) {
    PotentialSpec out;
    out.site = [strength](int, const Vec2& y) { return strength * y.dot(y); };
    out.label = "harmonic";
    return out;
}

PotentialSpec PotentialSpec::from_callable(Callable f, std::string label) {
    PotentialSpec out;
    out.callable = std::move(f);
    out.label = std::move(label);
    return out;
}

PotentialIntegral potential_integral(const PotentialSpec& v, const std::vector<Vec2>& x, const LevyPath& path,
                                     double t) {
    if (static_cast<int>(x.size()) != path.n_particles)
        throw std::invalid_argument("potential_integral: x has wrong particle count");
    PotentialIntegral out;
    if (v.is_zero() || t <= 0.0) return out;
    if (!v.site && !v.pair && !v.callable) {
        out.value = v.shift * t;
        return out;
    }
    std::vector<Vec2> pos = x;
    double cur = 0.0;
    auto segment = [&](double end) {
        if (end <= cur) return;
        const double val = v(pos);
        if (!std::isfinite(val) || std::fabs(val) > v.guard) out.diverged = true;
        out.value += (end - cur) * val;
        cur = end;
    };
    for (const auto& e : path.events) {
        if (e.time > t) break;
        segment(e.time);
        pos[e.particle] += e.jump;
    }
    segment(t);
    if (out.diverged) out.value = 0.0;
    return out;
}

}  // namespace nelson2d
