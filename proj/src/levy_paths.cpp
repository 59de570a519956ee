#include "nelson2d/levy_path.hpp"

#include <algorithm>
#include <boost/math/special_functions/lambert_w.hpp>
#include "json.hpp"
#include <sstream>
#include <stdexcept>

#include "nelson2d/special_functions.hpp"

namespace nelson2d {

std::vector<Vec2> LevyPath::position_at(double t) const {
    std::vector<Vec2> pos(n_particles);
    for (const auto& e : events) {
        if (e.time > t) break;
        pos[e.particle] += e.jump;
    }
    return pos;
}

std::vector<Vec2> LevyPath::left_limit(double t) const {
    std::vector<Vec2> pos(n_particles);
    for (const auto& e : events) {
        if (e.time >= t) break;
        pos[e.particle] += e.jump;
    }
    return pos;
}

std::size_t LevyPath::n_jumps() const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [](const PathEvent& e) { return e.kind == EventKind::jump; }));
}

double LevyPath::extent(const std::vector<Vec2>& x) const {
    // Bounding box of all visited points; its diagonal bounds every pairwise distance.
    double lo_x = kInf, lo_y = kInf, hi_x = -kInf, hi_y = -kInf;
    auto visit = [&](const Vec2& p) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    };
    std::vector<Vec2> pos = x;
    pos.resize(n_particles);
    for (const auto& p : pos) visit(p);
    for (const auto& e : events) {
        pos[e.particle] += e.jump;
        visit(pos[e.particle]);
    }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
}

void LevyPath::validate() const {
    if (n_particles < 1) throw std::invalid_argument("LevyPath: n_particles must be >= 1");
    if (!(horizon >= 0.0)) throw std::invalid_argument("LevyPath: negative horizon");
    double prev = -kInf;
    for (const auto& e : events) {
        if (!(e.time > prev)) throw std::invalid_argument("LevyPath: event times must increase strictly");
        if (e.time < 0.0 || e.time > horizon) throw std::invalid_argument("LevyPath: event outside [0, horizon]");
        if (e.particle < 0 || e.particle >= n_particles) throw std::invalid_argument("LevyPath: bad particle index");
        if (!std::isfinite(e.jump.x) || !std::isfinite(e.jump.y))
            throw std::invalid_argument("LevyPath: non-finite jump");
        prev = e.time;
    }
}

LevyPath frozen_path(int n_particles, double horizon) {
    LevyPath p;
    p.n_particles = n_particles;
    p.horizon = horizon;
    return p;
}

double sample_subordinator(double dt, double m_p, RngStream& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_subordinator: dt must be positive");
    const double z = rng.normal();
    if (m_p == 0.0) return dt * dt / (z * z);
    // Inverse Gaussian with mean dt/m_p and shape dt^2.
    const double mu = dt / m_p;
    const double a = mu * z * z / (2.0 * dt * dt);
    const double x = mu / (1.0 + a + std::sqrt(a * (2.0 + a)));
    return rng.uniform() * (mu + x) <= mu ? x : mu * mu / x;
}

Vec2 sample_increment(double dt, double m_p, RngStream& rng) {
    const double s = std::sqrt(sample_subordinator(dt, m_p, rng));
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return {s * z1, s * z2};
}

JumpLaw::JumpLaw(double m_p, double epsilon) : m_p_(m_p), eps_(epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("JumpLaw: epsilon must be positive");
    if (!(m_p >= 0.0)) throw std::invalid_argument("JumpLaw: m_p must be >= 0");
    rate_ = levy_tail_mass(epsilon, m_p);
}

double JumpLaw::radius_at(double u) const {
    if (m_p_ == 0.0) return eps_ / u;
    // Solve exp(-m a)/a = u exp(-m eps)/eps, i.e. (m a) e^{m a} = m eps e^{m eps}/u.
    const double me = m_p_ * eps_;
    const double arg = me * std::exp(me) / u;
    return boost::math::lambert_w0(arg) / m_p_;
}

Vec2 JumpLaw::sample(RngStream& rng) const {
    const double r = radius_at(rng.uniform());
    const double phi = 2.0 * kPi * rng.uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
}

LevyPath sample_jump_path(double horizon, double m_p, double epsilon, int n_particles, RngStream& rng,
                          const JumpPathOptions& opts) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("sample_jump_path: epsilon must be positive");
    if (!(horizon >= 0.0)) throw std::invalid_argument("sample_jump_path: negative horizon");
    if (n_particles < 1) throw std::invalid_argument("sample_jump_path: n_particles must be >= 1");
    const JumpLaw law(m_p, epsilon);
    LevyPath path;
    path.n_particles = n_particles;
    path.horizon = horizon;
    path.epsilon = epsilon;
    path.gaussian_correction = opts.gaussian_correction;
    for (int j = 0; j < n_particles; ++j) {
        double t = 0.0;
        while (true) {
            t += rng.exponential() / law.rate();
            if (t > horizon) break;
            path.events.push_back({t, j, law.sample(rng), EventKind::jump});
        }
        if (opts.gaussian_correction) {
            if (!(opts.correction_step > 0.0)) throw std::invalid_argument("sample_jump_path: bad correction step");
            const double sd = std::sqrt(levy_small_jump_variance(epsilon, m_p) * opts.correction_step);
            // Particle j moves at offsets (k + (j + 1/2)/N) h so that moves never coincide.
            const double offset = (j + 0.5) / n_particles * opts.correction_step;
            for (double s = offset; s <= horizon; s += opts.correction_step) {
                const double a = rng.normal(), b = rng.normal();
                path.events.push_back({s, j, {sd * a, sd * b}, EventKind::diffusive});
            }
        }
    }
    std::sort(path.events.begin(), path.events.end(),
              [](const PathEvent& a, const PathEvent& b) { return a.time < b.time; });
    path.validate();
    return path;
}

LevyPath sample_increment_path(double horizon, double dt, double m_p, int n_particles, RngStream& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment_path: dt must be positive");
    if (!(horizon >= 0.0)) throw std::invalid_argument("sample_increment_path: negative horizon");
    LevyPath path;
    path.n_particles = n_particles;
    path.horizon = horizon;
    const auto steps = static_cast<long>(std::floor(horizon / dt * (1.0 + 1e-12)));
    for (long k = 1; k <= steps; ++k)
        for (int j = 0; j < n_particles; ++j) {
            // Particles move in turn within a step so that event times stay distinct.
            const double s = (k - 1.0 + (j + 1.0) / n_particles) * dt;
            if (s > horizon) break;
            path.events.push_back({s, j, sample_increment(dt, m_p, rng), EventKind::increment});
        }
    path.validate();
    return path;
}

LevyPath PathSampler::sample(double horizon, double m_p, int n_particles, RngStream& rng) const {
    if (kind == Kind::increments) return sample_increment_path(horizon, dt, m_p, n_particles, rng);
    JumpPathOptions opts;
    opts.gaussian_correction = gaussian_correction;
    opts.correction_step = correction_step;
    return sample_jump_path(horizon, m_p, epsilon, n_particles, rng, opts);
}

std::pair<std::vector<Vec2>, LevyPath> split_path(const LevyPath& path, double t) {
    if (t < 0.0 || t > path.horizon) throw std::out_of_range("split_path: t outside [0, horizon]");
    LevyPath rest;
    rest.n_particles = path.n_particles;
    rest.horizon = path.horizon - t;
    rest.epsilon = path.epsilon;
    rest.gaussian_correction = path.gaussian_correction;
    std::vector<Vec2> head(path.n_particles);
    for (const auto& e : path.events) {
        if (e.time <= t) {
            head[e.particle] += e.jump;
        } else {
            PathEvent s = e;
            s.time = e.time - t;
            rest.events.push_back(s);
        }
    }
    return {head, rest};
}

std::string path_to_json_lines(const LevyPath& path) {
    std::ostringstream out;
    for (int j = 0; j < path.n_particles; ++j) {
        nlohmann::json line;
        line["particle"] = j;
        line["epsilon"] = path.epsilon;
        line["horizon"] = path.horizon;
        auto ev = nlohmann::json::array();
        for (const auto& e : path.events)
            if (e.particle == j) ev.push_back({e.time, e.jump.x, e.jump.y});
        line["events"] = ev;
        out << line.dump() << '\n';
    }
    return out.str();
}

}  // namespace nelson2d
