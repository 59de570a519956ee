#include "nelson2d/kspace.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nelson2d/quadrature.hpp"

namespace nelson2d {

void ModelParams::validate(bool allow_massless) const {
    if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
    if (!(m_p >= 0.0)) throw std::invalid_argument("m_p must be >= 0");
    if (allow_massless ? !(m_b >= 0.0) : !(m_b > 0.0))
        throw std::invalid_argument("m_b must be > 0");
    if (!std::isfinite(g)) throw std::invalid_argument("g must be finite");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (!(lambda > sigma)) throw std::invalid_argument("lambda must exceed sigma");
}

namespace {

// (x - 1 + e^{-x}) / x^2
double phi2(double x) {
    if (x < 1e-3) return 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
    return (x + std::expm1(-x)) / (x * x);
}

}  // namespace

KGrid::KGrid(const ModelParams& params, double lo, double hi, const GridSpec& spec)
    : params_(params), lo_(lo), hi_(hi) {
    if (!(lo >= 0.0) || !(hi >= lo)) throw std::invalid_argument("KGrid: need 0 <= lo <= hi");
    double top = hi;
    if (!std::isfinite(hi)) {
        truncated_ = true;
        top = spec.r_max > 0.0 ? spec.r_max : 64.0 * std::max(1.0, params.m_b);
        top = std::max(top, lo);
    }
    const double extent = std::max(spec.extent, 1e-3);
    int panels = spec.radial_panels;
    if (panels <= 0) {
        const double width = std::min(2.0, 6.0 / extent);
        panels = std::max(2, static_cast<int>(std::ceil((top - lo) / width)));
    }
    std::vector<double> w;
    if (top > lo) append_panels(lo, top, panels, spec.radial_order, r_, w);
    int nt = spec.angular;
    if (nt <= 0) {
        const double x = top * extent;
        nt = static_cast<int>(std::ceil(x + 2.0 * std::cbrt(x) + 24.0));
    }
    nt = 4 * ((nt + 3) / 4);
    dtheta_ = 2.0 * kPi / nt;
    cos_.resize(nt);
    sin_.resize(nt);
    for (int it = 0; it < nt; ++it) {
        cos_[it] = std::cos(it * dtheta_);
        sin_[it] = std::sin(it * dtheta_);
    }
    const std::size_t nr = r_.size();
    area_r_.resize(nr);
    omega_.resize(nr);
    psi_.resize(nr);
    v_.resize(nr);
    beta_.resize(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        area_r_[i] = w[i] * r_[i] * dtheta_;
        omega_[i] = omega_of(r_[i], params.m_b);
        psi_[i] = psi_of(r_[i], params.m_p);
        v_[i] = coupling_v(r_[i], params);
        beta_[i] = beta_of(r_[i], params);
    }
}

void KGrid::plane_wave(const Vec2& p, std::vector<cplx>& out) const {
    const std::size_t nt = cos_.size();
    out.resize(size());
    for (std::size_t it = 0; it < nt; ++it) {
        const double a = p.x * cos_[it] + p.y * sin_[it];
        for (std::size_t ir = 0; ir < r_.size(); ++ir) {
            const double ph = -r_[ir] * a;
            out[ir * nt + it] = cplx(std::cos(ph), std::sin(ph));
        }
    }
}

bool KGrid::same_as(const KGrid& o) const {
    return this == &o || (lo_ == o.lo_ && hi_ == o.hi_ && r_ == o.r_ && cos_.size() == o.cos_.size() &&
                          params_.m_b == o.params_.m_b && params_.m_p == o.params_.m_p &&
                          params_.g == o.params_.g);
}

GridPtr make_grid(const ModelParams& params, double lo, double hi, const GridSpec& spec) {
    return std::make_shared<const KGrid>(params, lo, hi, spec);
}

FieldFunction FieldFunction::zeros(GridPtr grid) {
    FieldFunction f;
    f.values_.assign(grid->size(), cplx(0.0));
    f.grid_ = std::move(grid);
    return f;
}

FieldFunction FieldFunction::radial(GridPtr grid, std::vector<cplx> values) {
    if (values.size() != grid->n_radial()) throw std::invalid_argument("FieldFunction: radial size mismatch");
    FieldFunction f;
    f.grid_ = std::move(grid);
    f.radial_only_ = true;
    f.values_ = std::move(values);
    return f;
}

FieldFunction FieldFunction::full(GridPtr grid, std::vector<cplx> values) {
    if (values.size() != grid->size()) throw std::invalid_argument("FieldFunction: size mismatch");
    FieldFunction f;
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    return f;
}

cplx FieldFunction::at(std::size_t ir, std::size_t it) const {
    return radial_only_ ? values_[ir] : values_[ir * grid_->n_theta() + it];
}

FieldFunction FieldFunction::expanded() const {
    if (!radial_only_) return *this;
    const std::size_t nt = grid_->n_theta();
    std::vector<cplx> out(grid_->size());
    for (std::size_t ir = 0; ir < values_.size(); ++ir)
        std::fill_n(out.begin() + ir * nt, nt, values_[ir]);
    return full(grid_, std::move(out));
}

namespace {

void check_same(const FieldFunction& a, const FieldFunction& b) {
    if (!a.grid() || !b.grid() || !a.grid()->same_as(*b.grid()))
        throw std::invalid_argument("FieldFunction: grid mismatch");
}

}  // namespace

FieldFunction& FieldFunction::operator+=(const FieldFunction& o) {
    check_same(*this, o);
    if (radial_only_ && !o.radial_only_) *this = expanded();
    const std::size_t nt = grid_->n_theta();
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i] += o.radial_only_ && !radial_only_ ? o.values_[i / nt] : o.values_[i];
    return *this;
}

FieldFunction& FieldFunction::operator-=(const FieldFunction& o) {
    FieldFunction neg = o;
    neg *= -1.0;
    return *this += neg;
}

FieldFunction& FieldFunction::operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
}

FieldFunction FieldFunction::times_radial(const std::vector<double>& f) const {
    FieldFunction out = *this;
    const std::size_t nt = radial_only_ ? 1 : grid_->n_theta();
    for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] *= f[i / nt];
    return out;
}

cplx inner(const FieldFunction& a, const FieldFunction& b) {
    check_same(a, b);
    const KGrid& g = *a.grid();
    const auto& w = g.radial_area_weights();
    const std::size_t nt = g.n_theta();
    cplx sum = 0.0;
    for (std::size_t ir = 0; ir < g.n_radial(); ++ir) {
        cplx s = 0.0;
        if (a.radial_only() && b.radial_only()) {
            s = std::conj(a.values()[ir]) * b.values()[ir] * static_cast<double>(nt);
        } else {
            for (std::size_t it = 0; it < nt; ++it) s += std::conj(a.at(ir, it)) * b.at(ir, it);
        }
        sum += w[ir] * s;
    }
    return sum;
}

namespace {

double weighted_norm(const FieldFunction& f, const std::vector<double>& radial_weight) {
    const KGrid& g = *f.grid();
    const auto& w = g.radial_area_weights();
    const std::size_t nt = g.n_theta();
    double sum = 0.0;
    for (std::size_t ir = 0; ir < g.n_radial(); ++ir) {
        double s = 0.0;
        if (f.radial_only()) {
            s = std::norm(f.values()[ir]) * static_cast<double>(nt);
        } else {
            for (std::size_t it = 0; it < nt; ++it) s += std::norm(f.values()[ir * nt + it]);
        }
        sum += w[ir] * radial_weight[ir] * s;
    }
    return std::sqrt(sum);
}

}  // namespace

double l2_norm(const FieldFunction& f) {
    return weighted_norm(f, std::vector<double>(f.grid()->n_radial(), 1.0));
}

double t_norm(const FieldFunction& f, double t) {
    if (!(t > 0.0)) throw std::domain_error("t_norm: t must be positive");
    const auto& om = f.grid()->omega();
    std::vector<double> wt(om.size());
    for (std::size_t i = 0; i < om.size(); ++i) wt[i] = 1.0 + 1.0 / (t * om[i]);
    return weighted_norm(f, wt);
}

double t_norm_omega(const FieldFunction& f, double t) {
    if (!(t > 0.0)) throw std::domain_error("t_norm: t must be positive");
    const auto& om = f.grid()->omega();
    std::vector<double> wt(om.size());
    for (std::size_t i = 0; i < om.size(); ++i) wt[i] = (1.0 + 1.0 / (t * om[i])) * om[i] * om[i];
    return weighted_norm(f, wt);
}

double real_symmetry_residual(const FieldFunction& f) {
    if (f.radial_only()) {
        double m = 0.0;
        for (const auto& v : f.values()) m = std::max(m, std::fabs(v.imag()));
        return m;
    }
    const KGrid& g = *f.grid();
    const std::size_t nt = g.n_theta(), half = nt / 2;
    double m = 0.0;
    for (std::size_t ir = 0; ir < g.n_radial(); ++ir)
        for (std::size_t it = 0; it < nt; ++it) {
            const cplx a = f.values()[ir * nt + it];
            const cplx b = f.values()[ir * nt + (it + half) % nt];
            m = std::max(m, std::abs(a - std::conj(b)));
        }
    return m;
}

FieldFunction coupling_field(GridPtr grid) {
    std::vector<cplx> v(grid->v().begin(), grid->v().end());
    return FieldFunction::radial(std::move(grid), std::move(v));
}

FieldFunction beta_field(GridPtr grid) {
    std::vector<cplx> v(grid->beta().begin(), grid->beta().end());
    return FieldFunction::radial(std::move(grid), std::move(v));
}

FieldFunction decayed_coupling(GridPtr grid, double s) {
    std::vector<cplx> v(grid->n_radial());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-s * grid->omega()[i]) * grid->v()[i];
    return FieldFunction::radial(std::move(grid), std::move(v));
}

double renorm_energy(double sigma, double lambda, const ModelParams& params) {
    if (!std::isfinite(lambda))
        throw std::domain_error("renorm_energy: the counter term diverges for lambda = inf");
    if (!(sigma >= 0.0) || sigma > lambda) throw std::invalid_argument("renorm_energy: need 0 <= sigma <= lambda");
    if (sigma == lambda) return 0.0;
    auto f = [&](double r) {
        const double w = omega_of(r, params.m_b);
        return r / (w * (w + psi_of(r, params.m_p)));
    };
    return 2.0 * kPi * params.g2() * integrate_adaptive(f, sigma, lambda, 1e-13);
}

FieldEvolver::FieldEvolver(GridPtr grid, const std::vector<Vec2>& x, bool track_minus)
    : grid_(std::move(grid)), track_minus_(track_minus), pos_(x) {
    const std::size_t n = grid_->size();
    phases_.resize(x.size());
    phase_sum_.assign(n, cplx(0.0));
    for (std::size_t j = 0; j < x.size(); ++j) {
        grid_->plane_wave(x[j], phases_[j]);
        for (std::size_t i = 0; i < n; ++i) phase_sum_[i] += phases_[j][i];
    }
    up_.assign(n, cplx(0.0));
    if (track_minus_) um_.assign(n, cplx(0.0));
}

void FieldEvolver::advance(double s) {
    static const std::vector<const std::vector<double>*> none;
    std::vector<cplx> dummy;
    integrate_then_advance(s, none, dummy);
}

void FieldEvolver::integrate_then_advance(double s, const std::vector<const std::vector<double>*>& weights,
                                          std::vector<cplx>& integrals) {
    const double dt = s - time_;
    if (dt < 0.0) throw std::invalid_argument("FieldEvolver: time must not decrease");
    integrals.assign(weights.size(), cplx(0.0));
    if (dt == 0.0) return;
    const KGrid& g = *grid_;
    const std::size_t nt = g.n_theta();
    const auto& om = g.omega();
    const auto& v = g.v();
    const auto& aw = g.radial_area_weights();
    for (std::size_t ir = 0; ir < g.n_radial(); ++ir) {
        const double x = dt * om[ir];
        const double decay = std::exp(-x);
        const double a1 = -std::expm1(-x) / om[ir];  // int_0^dt e^{-r w} dr
        const double a2 = dt * dt * phi2(x);         // int_0^dt (1 - e^{-r w})/w dr
        const double start = track_minus_ ? std::exp(-time_ * om[ir]) : 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            const double wk = (*weights[k])[ir];
            if (wk == 0.0) continue;
            cplx s_acc = 0.0;
            for (std::size_t it = 0; it < nt; ++it) {
                const std::size_t i = ir * nt + it;
                const cplx src = v[ir] * phase_sum_[i];
                const cplx integ = a1 * up_[i] + a2 * src;
                s_acc += std::conj(integ) * (wk * phase_sum_[i]);
            }
            integrals[k] += aw[ir] * s_acc;
        }
        for (std::size_t it = 0; it < nt; ++it) {
            const std::size_t i = ir * nt + it;
            const cplx src = v[ir] * phase_sum_[i];
            up_[i] = decay * up_[i] + a1 * src;
            if (track_minus_) um_[i] += start * a1 * src;
        }
    }
    time_ = s;
}

cplx FieldEvolver::move(int particle, const Vec2& jump, const std::vector<double>* weight) {
    auto& ph = phases_.at(particle);
    pos_[particle] += jump;
    std::vector<cplx> fresh;
    grid_->plane_wave(pos_[particle], fresh);
    cplx out = 0.0;
    const std::size_t nt = grid_->n_theta();
    if (weight) {
        const auto& aw = grid_->radial_area_weights();
        for (std::size_t ir = 0; ir < grid_->n_radial(); ++ir) {
            cplx acc = 0.0;
            for (std::size_t it = 0; it < nt; ++it) {
                const std::size_t i = ir * nt + it;
                acc += std::conj(up_[i]) * (fresh[i] - ph[i]);
            }
            out += aw[ir] * (*weight)[ir] * acc;
        }
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) phase_sum_[i] += fresh[i] - ph[i];
    ph.swap(fresh);
    return out;
}

cplx FieldEvolver::overlap(const std::vector<double>& weight) const {
    const std::size_t nt = grid_->n_theta();
    const auto& aw = grid_->radial_area_weights();
    cplx out = 0.0;
    for (std::size_t ir = 0; ir < grid_->n_radial(); ++ir) {
        cplx acc = 0.0;
        for (std::size_t it = 0; it < nt; ++it) {
            const std::size_t i = ir * nt + it;
            acc += std::conj(up_[i]) * phase_sum_[i];
        }
        out += aw[ir] * weight[ir] * acc;
    }
    return out;
}

FieldFunction FieldEvolver::plus_field() const { return FieldFunction::full(grid_, up_); }

FieldFunction FieldEvolver::minus_field() const {
    if (!track_minus_) throw std::logic_error("FieldEvolver: U^- not tracked");
    return FieldFunction::full(grid_, um_);
}

FieldFunction u_process(USign sign, const std::vector<Vec2>& x, const LevyPath& path, double t,
                        GridPtr grid) {
    if (static_cast<int>(x.size()) != path.n_particles)
        throw std::invalid_argument("u_process: x has wrong particle count");
    if (t < 0.0 || t > path.horizon * (1.0 + 1e-12) + 1e-300)
        throw std::out_of_range("u_process: t outside path horizon");
    FieldEvolver ev(std::move(grid), x, sign == USign::minus);
    for (const auto& e : path.events) {
        if (e.time > t) break;
        ev.advance(e.time);
        ev.move(e.particle, e.jump);
    }
    ev.advance(t);
    return sign == USign::plus ? ev.plus_field() : ev.minus_field();
}

}  // namespace nelson2d
