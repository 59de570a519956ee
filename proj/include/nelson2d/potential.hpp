#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nelson2d/levy_path.hpp"

namespace nelson2d {

// External potential V(x_1, ..., x_N) built from single-site terms V_j(x_j) and
// pair terms V_ij(x_i - x_j), or any bounded callable.
struct PotentialSpec {
    using SiteTerm = std::function<double(int, const Vec2&)>;
    using PairTerm = std::function<double(int, int, const Vec2&)>;
    using Callable = std::function<double(const std::vector<Vec2>&)>;

    double shift = 0.0;
    SiteTerm site;
    PairTerm pair;
    Callable callable;
    // Segment values above this are treated as a divergence.
    double guard = 1e12;
    std::string label = "zero";

    double operator()(const std::vector<Vec2>& x) const;
    bool is_zero() const { return shift == 0.0 && !site && !pair && !callable; }
    // Same potential plus a constant.
    PotentialSpec shifted(double c) const;

    static PotentialSpec zero();
    static PotentialSpec constant(double c);
    // strength / (|x_i - x_j| + softening) for every pair.
    static PotentialSpec coulomb_pairs(double strength, double softening);
    // strength |x_j|^2 for every particle.
    static PotentialSpec harmonic(double strength);
    static PotentialSpec from_callable(Callable f, std::string label = "callable");
};

struct PotentialIntegral {
    double value = 0.0;
    bool diverged = false;
};

// int_0^t V(x + path_s) ds, exact per constant segment.  A segment value above the
// guard (or non-finite) flags divergence and the integral is reported as 0.
PotentialIntegral potential_integral(const PotentialSpec& v, const std::vector<Vec2>& x, const LevyPath& path,
                                     double t);

}  // namespace nelson2d
