#include "nelson2d/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace nelson2d {

double WeightFunction::operator()(const std::vector<Vec2>& x) const {
    if (kind == Kind::box) {
        for (const auto& p : x)
            if (std::fabs(p.x) > size || std::fabs(p.y) > size) return 0.0;
        return 1.0;
    }
    double q = 0.0;
    for (const auto& p : x) q += p.dot(p);
    return std::exp(-0.5 * q / (size * size));
}

std::vector<Vec2> WeightFunction::sample(int n_particles, RngStream& rng) const {
    std::vector<Vec2> x(n_particles);
    for (auto& p : x) {
        if (kind == Kind::box) {
            p.x = size * (2.0 * rng.uniform() - 1.0);
            p.y = size * (2.0 * rng.uniform() - 1.0);
        } else {
            p.x = size * rng.normal();
            p.y = size * rng.normal();
        }
    }
    return x;
}

ActionEvaluator::ActionEvaluator(const ModelParams& params, const EstimatorOptions& opts)
    : params_(params), opts_(opts) {
    params.validate();
    if (std::isfinite(params.lambda))
        kernel_ = std::make_shared<const SegmentKernel>(params, params.sigma, params.lambda, opts.kernel_range,
                                                        opts.kernel_resolution);
    if (std::isnan(opts_.kappa)) opts_.kappa = default_kappa(params);
}

std::vector<double> ActionEvaluator::trace(const std::vector<Vec2>& x, const LevyPath& path,
                                           const std::vector<double>& times, double* sup, double sup_step) const {
    if (kernel_) return direct_action_trace(x, path, times, *kernel_, sup, sup_step);
    std::vector<double> grid_times = times;
    if (sup && sup_step > 0.0 && !times.empty()) {
        for (double s = sup_step; s < times.back(); s += sup_step) grid_times.push_back(s);
        std::sort(grid_times.begin(), grid_times.end());
    }
    ActionOptions ao;
    ao.grid = opts_.grid;
    ao.cache_dir = opts_.cache_dir;
    std::vector<double> out;
    double best = 0.0;
    std::size_t next = 0;
    for (double s : grid_times) {
        const double u = renormalized_action(x, path, s, params_, opts_.kappa, ao).u;
        best = std::max(best, u);
        while (next < times.size() && times[next] == s) {
            out.push_back(u);
            ++next;
        }
    }
    if (sup) *sup = best;
    return out;
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    if (threads <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&]() {
            for (long i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

// Pairwise summation keeps the reduction independent of the worker count.
double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

struct Sample {
    double log_w = 0.0;  // u - int V
    double f = 0.0;      // f(X_t), 0 when diverged
    bool diverged = false;
};

KacResult reduce(double t, const std::vector<Sample>& samples) {
    KacResult out;
    out.t = t;
    double top = -kInf;
    for (const auto& s : samples) {
        if (s.diverged) {
            ++out.diverged;
            continue;
        }
        if (s.f > 0.0) top = std::max(top, s.log_w);
    }
    const std::size_t n = samples.size();
    if (out.diverged == static_cast<long>(n)) throw std::runtime_error("kac_average: every path diverged");
    if (!std::isfinite(top)) return out;
    std::vector<double> w(n), w2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        w[i] = s.diverged ? 0.0 : s.f * std::exp(s.log_w - top);
        w2[i] = w[i] * w[i];
    }
    const double sum = pairwise_sum(w.data(), n), sum2 = pairwise_sum(w2.data(), n);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean) * n / std::max<double>(1.0, n - 1.0);
    const double scale = std::exp(top);
    out.mean = mean * scale;
    out.stderr_ = std::sqrt(var / n) * scale;
    out.n_eff = sum2 > 0.0 ? sum * sum / sum2 : 0.0;
    return out;
}

}  // namespace

std::vector<KacResult> kac_ladder(const ModelParams& params, const PotentialSpec& v, const std::vector<double>& ladder,
                                  const WeightFunction& f, long n_paths, const RngStream& rng,
                                  const EstimatorOptions& opts) {
    if (n_paths < 2) throw std::invalid_argument("kac_average: need at least two paths");
    if (ladder.empty() || !std::is_sorted(ladder.begin(), ladder.end()) || !(ladder.front() >= 0.0))
        throw std::invalid_argument("kac_average: ladder must be nonnegative and increasing");
    const ActionEvaluator eval(params, opts);
    const int n = params.n_particles;
    const std::size_t nt = ladder.size();
    std::vector<Sample> samples(static_cast<std::size_t>(n_paths) * nt);
    parallel_for(n_paths, opts.threads, [&](long i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        const std::vector<Vec2> x = f.sample(n, r);
        const LevyPath path = opts.sampler.sample(ladder.back(), params.m_p, n, r);
        const std::vector<double> u =
            params.g == 0.0 ? std::vector<double>(nt, 0.0) : eval.trace(x, path, ladder);
        for (std::size_t k = 0; k < nt; ++k) {
            Sample& s = samples[k * n_paths + i];
            const PotentialIntegral vi = potential_integral(v, x, path, ladder[k]);
            s.diverged = vi.diverged;
            if (vi.diverged) continue;
            std::vector<Vec2> xt = path.position_at(ladder[k]);
            for (int j = 0; j < n; ++j) xt[j] += x[j];
            s.log_w = u[k] - vi.value;
            s.f = f(xt);
        }
    });
    std::vector<KacResult> out;
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<Sample> col(samples.begin() + k * n_paths, samples.begin() + (k + 1) * n_paths);
        out.push_back(reduce(ladder[k], col));
    }
    return out;
}

KacResult kac_average(const ModelParams& params, const PotentialSpec& v, double t, const WeightFunction& f,
                      long n_paths, const RngStream& rng, const EstimatorOptions& opts) {
    return kac_ladder(params, v, {t}, f, n_paths, rng, opts).front();
}

EstimateReport ground_energy(const ModelParams& params, const PotentialSpec& v, const std::vector<double>& ladder,
                             const WeightFunction& f, long n_paths, const RngStream& rng,
                             const EstimatorOptions& opts) {
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (!(ladder[i] > ladder[i - 1])) throw std::invalid_argument("ground_energy: ladder must increase");
    if (ladder.empty() || !(ladder.front() > 0.0)) throw std::invalid_argument("ground_energy: ladder must be positive");
    EstimateReport rep;
    rep.params = params;
    rep.n_paths = n_paths;
    for (const auto& k : kac_ladder(params, v, ladder, f, n_paths, rng, opts)) {
        EnergyRow row;
        row.t = k.t;
        row.mean = k.mean;
        row.stderr_ = k.stderr_;
        row.n_eff = k.n_eff;
        rep.diverged += k.diverged;
        if (!(k.mean > 0.0) || !std::isfinite(k.mean)) {
            row.dropped = true;
            row.energy = row.energy_err = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.energy = -std::log(k.mean) / k.t;
            row.energy_err = k.stderr_ / (k.mean * k.t);
        }
        rep.rows.push_back(row);
    }
    std::vector<const EnergyRow*> valid;
    for (const auto& r : rep.rows)
        if (!r.dropped) valid.push_back(&r);
    if (valid.size() > 4) valid.erase(valid.begin(), valid.end() - 4);
    if (valid.size() == 1) {
        rep.extrapolated = valid[0]->energy;
        rep.extrapolated_err = valid[0]->energy_err;
        rep.method = "last";
    } else if (valid.size() >= 2) {
        // Weighted least squares for E(t) = a + b / t.
        double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto* r : valid) {
            const double w = 1.0 / std::max(r->energy_err * r->energy_err, 1e-300);
            const double xv = 1.0 / r->t;
            s += w;
            sx += w * xv;
            sy += w * r->energy;
            sxx += w * xv * xv;
            sxy += w * xv * r->energy;
        }
        const double det = s * sxx - sx * sx;
        if (det > 0.0) {
            rep.extrapolated = (sxx * sy - sx * sxy) / det;
            rep.extrapolated_err = std::sqrt(sxx / det);
        } else {
            rep.extrapolated = valid.back()->energy;
            rep.extrapolated_err = valid.back()->energy_err;
            rep.method = "last";
        }
    }
    return rep;
}

std::string report_to_json(const EstimateReport& report) {
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    const auto& p = report.params;
    j["params"] = {{"n_particles", p.n_particles}, {"m_p", p.m_p},    {"m_b", p.m_b},
                   {"g", p.g},                     {"sigma", p.sigma}, {"lambda", num(p.lambda)}};
    j["n_paths"] = report.n_paths;
    j["diverged"] = report.diverged;
    j["method"] = report.method;
    j["extrapolated"] = num(report.extrapolated);
    j["extrapolated_err"] = num(report.extrapolated_err);
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"t", r.t},
                        {"mean", num(r.mean)},
                        {"stderr", num(r.stderr_)},
                        {"n_eff", num(r.n_eff)},
                        {"energy", num(r.energy)},
                        {"energy_err", num(r.energy_err)},
                        {"dropped", r.dropped}});
    j["rows"] = rows;
    return j.dump(2);
}

MomentEstimate sup_exp_moment(const ModelParams& params, const std::vector<Vec2>& x, double p, double t,
                              long n_paths, const RngStream& rng, const EstimatorOptions& opts, double sup_step) {
    if (n_paths < 2) throw std::invalid_argument("sup_exp_moment: need at least two paths");
    const ActionEvaluator eval(params, opts);
    std::vector<double> vals(n_paths), sq(n_paths);
    parallel_for(n_paths, opts.threads, [&](long i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        const LevyPath path = opts.sampler.sample(t, params.m_p, params.n_particles, r);
        double sup = 0.0;
        eval.trace(x, path, {t}, &sup, sup_step);
        vals[i] = std::exp(p * sup);
        sq[i] = vals[i] * vals[i];
    });
    MomentEstimate out;
    const double n = static_cast<double>(n_paths);
    out.mean = pairwise_sum(vals.data(), vals.size()) / n;
    const double var = std::max(0.0, pairwise_sum(sq.data(), sq.size()) / n - out.mean * out.mean) * n / (n - 1.0);
    out.stderr_ = std::sqrt(var / n);
    return out;
}

namespace {

// int_0^t f(x + path_s) ds for a single particle, exact per segment.
double path_integral(const std::function<double(const Vec2&)>& f, const Vec2& x, const LevyPath& path, double t,
                     double scale = 1.0) {
    Vec2 pos = x;
    double cur = 0.0, acc = 0.0;
    for (const auto& e : path.events) {
        if (e.time > t) break;
        acc += (e.time - cur) * f(pos);
        cur = e.time;
        pos += scale * e.jump;
    }
    acc += (t - cur) * f(pos);
    return acc;
}

}  // namespace

KatoTable kato_probe(const std::function<double(const Vec2&)>& f, double m_p, const std::vector<double>& t_ladder,
                     const std::vector<Vec2>& x_grid, long n_paths, const RngStream& rng, const PathSampler& sampler) {
    if (t_ladder.empty() || x_grid.empty() || n_paths < 2) throw std::invalid_argument("kato_probe: empty input");
    if (!std::is_sorted(t_ladder.begin(), t_ladder.end())) throw std::invalid_argument("kato_probe: unsorted ladder");
    const std::size_t nt = t_ladder.size(), nx = x_grid.size();
    std::vector<double> vals(static_cast<std::size_t>(n_paths) * nt * nx);
    for (long i = 0; i < n_paths; ++i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        const LevyPath path = sampler.sample(t_ladder.back(), m_p, 1, r);
        for (std::size_t k = 0; k < nt; ++k)
            for (std::size_t a = 0; a < nx; ++a)
                vals[(k * nx + a) * n_paths + i] = path_integral(f, x_grid[a], path, t_ladder[k]);
    }
    KatoTable out;
    for (std::size_t k = 0; k < nt; ++k) {
        KatoRow row;
        row.t = t_ladder[k];
        row.sup_value = -kInf;
        for (std::size_t a = 0; a < nx; ++a) {
            const double* v = &vals[(k * nx + a) * n_paths];
            double s = 0, s2 = 0;
            for (long i = 0; i < n_paths; ++i) {
                s += v[i];
                s2 += v[i] * v[i];
            }
            const double mean = s / n_paths;
            if (mean > row.sup_value) {
                row.sup_value = mean;
                row.argmax = x_grid[a];
                row.stderr_ = std::sqrt(std::max(0.0, s2 / n_paths - mean * mean) / (n_paths - 1.0));
            }
        }
        out.rows.push_back(row);
    }
    out.decreasing = true;
    for (std::size_t k = 1; k < nt; ++k)
        if (!(out.rows[k].sup_value > out.rows[k - 1].sup_value)) out.decreasing = false;
    return out;
}

double DiscPotential::lp_norm(double p) const { return height * std::pow(kPi * radius * radius, 1.0 / p); }

double carmona_rate(const CarmonaPoint& pt) {
    const double d = 2.0, p = pt.p;
    if (!(p > d / 2.0)) throw std::invalid_argument("carmona_rate: need p > d/2");
    const double inner = std::pow(pt.m_p, d / (2.0 * p)) * pt.v.lp_norm(p) + pt.v.lp_norm(2.0 * p);
    return std::pow(pt.a, -d / (2.0 * p - d)) * std::pow(inner, 1.0 / (1.0 - d / (2.0 * p)));
}

CarmonaEstimate carmona_lhs(const CarmonaPoint& pt, const std::vector<Vec2>& x_grid, long n_paths,
                            const RngStream& rng, const PathSampler& sampler) {
    if (!(pt.a > 0.0)) throw std::invalid_argument("carmona_lhs: a must be positive");
    const std::size_t nx = x_grid.size();
    std::vector<double> s(nx, 0.0), s2(nx, 0.0);
    for (long i = 0; i < n_paths; ++i) {
        RngStream r = rng.child(static_cast<std::uint64_t>(i));
        // Y_s = X_{a s}: int_0^t v(x + Y_s) ds = (1/a) int_0^{a t} v(x + X_r) dr
        const LevyPath path = sampler.sample(pt.a * pt.t, pt.m_p, 1, r);
        for (std::size_t k = 0; k < nx; ++k) {
            const double e = std::exp(path_integral(pt.v, x_grid[k], path, pt.a * pt.t) / pt.a);
            s[k] += e;
            s2[k] += e * e;
        }
    }
    CarmonaEstimate out;
    out.rate = carmona_rate(pt);
    out.lhs = -kInf;
    for (std::size_t k = 0; k < nx; ++k) {
        const double mean = s[k] / n_paths;
        if (mean > out.lhs) {
            out.lhs = mean;
            out.stderr_ = std::sqrt(std::max(0.0, s2[k] / n_paths - mean * mean) / (n_paths - 1.0));
        }
    }
    return out;
}

CarmonaVerdict carmona_check(const std::vector<CarmonaPoint>& calibration, const std::vector<CarmonaPoint>& held_out,
                             const std::vector<Vec2>& x_grid, long n_paths, const RngStream& rng,
                             const PathSampler& sampler) {
    CarmonaVerdict out;
    std::uint64_t tag = 0;
    for (const auto& pt : calibration) {
        const auto est = carmona_lhs(pt, x_grid, n_paths, rng.child(tag++), sampler);
        out.calibration.push_back(est);
        out.c = std::max(out.c, std::log(std::max(est.lhs, 1.0)) / (est.rate * pt.t));
    }
    out.respected = true;
    for (const auto& pt : held_out) {
        const auto est = carmona_lhs(pt, x_grid, n_paths, rng.child(tag++), sampler);
        const double bound = std::exp(out.c * est.rate * pt.t);
        out.held_out.push_back(est);
        out.held_out_bound.push_back(bound);
        if (est.lhs - 2.0 * est.stderr_ > bound) out.respected = false;
    }
    return out;
}

}  // namespace nelson2d
