#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nelson2d/rng.hpp"
#include "nelson2d/types.hpp"

namespace nelson2d {

enum class EventKind { jump, diffusive, increment };

struct PathEvent {
    double time = 0.0;
    int particle = 0;
    Vec2 jump;
    EventKind kind = EventKind::jump;
};

// Piecewise-constant multi-particle path started at the origin.  Events are
// sorted by strictly increasing time, one particle moves per event, and the
// value at time t includes every event with time <= t.
struct LevyPath {
    int n_particles = 1;
    double horizon = 0.0;
    double epsilon = 0.0;
    bool gaussian_correction = false;
    std::vector<PathEvent> events;

    std::vector<Vec2> position_at(double t) const;
    std::vector<Vec2> left_limit(double t) const;
    std::size_t n_jumps() const;
    // Largest distance between any two visited positions (all particles), plus
    // the spread of the given starting configuration.
    double extent(const std::vector<Vec2>& x) const;
    void validate() const;
};

// Constant path of the given horizon.
LevyPath frozen_path(int n_particles, double horizon);

// Subordinator increment S with E[e^{-uS}] = exp(-dt (sqrt(2u + m_p^2) - m_p)):
// inverse Gaussian for m_p > 0 (Michael-Schucany-Haas), dt^2/Z^2 for m_p = 0.
double sample_subordinator(double dt, double m_p, RngStream& rng);

// Exact increment X_dt = sqrt(S) (Z1, Z2).
Vec2 sample_increment(double dt, double m_p, RngStream& rng);

// Jumps of size > eps: rate and radius law from the closed-form tail mass.
class JumpLaw {
public:
    JumpLaw(double m_p, double epsilon);
    double rate() const { return rate_; }
    double epsilon() const { return eps_; }
    double m_p() const { return m_p_; }
    // Radius with P(R > a) = tail(a)/tail(eps), evaluated at survival level u in (0, 1].
    double radius_at(double u) const;
    Vec2 sample(RngStream& rng) const;

private:
    double m_p_, eps_, rate_;
};

struct JumpPathOptions {
    bool gaussian_correction = false;
    // Spacing of the diffusive moves used by the correction.
    double correction_step = 0.05;
};

// Compound Poisson approximation, independent per particle, merged in time.
LevyPath sample_jump_path(double horizon, double m_p, double epsilon, int n_particles, RngStream& rng,
                          const JumpPathOptions& opts = {});

// Exact increments on the time grid dt, 2dt, ...; the path is held constant in between.
LevyPath sample_increment_path(double horizon, double dt, double m_p, int n_particles, RngStream& rng);

// Path sampling recipe shared by the Monte Carlo drivers.
struct PathSampler {
    enum class Kind { jumps, increments };
    Kind kind = Kind::jumps;
    double epsilon = 0.1;
    bool gaussian_correction = true;
    double correction_step = 0.05;
    double dt = 0.05;  // increments only

    LevyPath sample(double horizon, double m_p, int n_particles, RngStream& rng) const;
};

// (X_t, path of X_{t+s} - X_t on [0, horizon - t]).
std::pair<std::vector<Vec2>, LevyPath> split_path(const LevyPath& path, double t);

// One JSON object per particle and line: {"particle": j, "events": [[t, dx, dy], ...]}.
std::string path_to_json_lines(const LevyPath& path);

}  // namespace nelson2d
