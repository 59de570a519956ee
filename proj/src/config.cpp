#include "nelson2d/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nelson2d {

using nlohmann::json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
    if (text.empty()) return 0;
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

bool flexible_key(const std::string& path) { return path == "model.lambda" || path == "estimator.kappa"; }

bool compatible(const json& base, const json& patch, const std::string& path) {
    if (flexible_key(path)) return patch.is_number() || patch.is_null() || patch.is_string();
    if (base.is_number()) return patch.is_number();
    return base.type() == patch.type();
}

void merge(json& base, const json& patch, const std::string& prefix, const std::string& text) {
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown key '" + path + "'", path, line_of_key(text, it.key()));
        json& slot = base[it.key()];
        if (slot.is_object()) {
            if (!it.value().is_object())
                throw ConfigError("'" + path + "' must be an object", path, line_of_key(text, it.key()));
            merge(slot, it.value(), path, text);
            continue;
        }
        if (!compatible(slot, it.value(), path))
            throw ConfigError("'" + path + "' expects a " + std::string(slot.type_name()) + ", got " +
                                  it.value().type_name(),
                              path, line_of_key(text, it.key()));
        slot = it.value();
    }
}

double read_number_or_inf(const json& v, const char* path, double if_null) {
    if (v.is_null()) return if_null;
    if (v.is_number()) return v.get<double>();
    const std::string s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "auto") return if_null;
    throw ConfigError(std::string("'") + path + "' must be a number, \"inf\" or \"auto\"", path);
}

template <typename T>
T read(const json& j, const char* section, const char* key) {
    try {
        return j.at(section).at(key).get<T>();
    } catch (const json::exception& e) {
        const std::string path = std::string(section) + "." + key;
        throw ConfigError("'" + path + "': " + e.what(), path);
    }
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::string key, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      key_(std::move(key)),
      line_(line) {}

PotentialSpec PotentialConfig::build() const {
    if (kind == "zero") return PotentialSpec::zero();
    if (kind == "constant") return PotentialSpec::constant(strength);
    if (kind == "harmonic") return PotentialSpec::harmonic(strength);
    if (kind == "coulomb") return PotentialSpec::coulomb_pairs(strength, softening);
    throw ConfigError("unknown potential kind '" + kind + "' (zero, constant, harmonic, coulomb)",
                      "estimator.potential.kind");
}

EstimatorOptions RunConfig::estimator_options() const {
    EstimatorOptions o;
    o.sampler = sampler;
    o.kappa = estimator.kappa;
    o.grid = grid;
    o.kernel_resolution = estimator.kernel_resolution;
    o.kernel_range = estimator.kernel_range;
    o.threads = threads;
    return o;
}

json RunConfig::to_json() const {
    json j;
    j["model"] = {{"N", model.n_particles},
                  {"m_p", model.m_p},
                  {"m_b", model.m_b},
                  {"g", model.g},
                  {"sigma", model.sigma},
                  {"lambda", std::isfinite(model.lambda) ? json(model.lambda) : json("inf")}};
    j["grid"] = {{"radial_panels", grid.radial_panels},
                 {"radial_order", grid.radial_order},
                 {"angular", grid.angular},
                 {"r_max", grid.r_max},
                 {"extent", grid.extent}};
    j["sampler"] = {{"kind", sampler.kind == PathSampler::Kind::jumps ? "jumps" : "increments"},
                    {"epsilon", sampler.epsilon},
                    {"gaussian_correction", sampler.gaussian_correction},
                    {"correction_step", sampler.correction_step},
                    {"dt", sampler.dt}};
    j["estimator"] = {
        {"t_ladder", estimator.t_ladder},
        {"n_paths", estimator.n_paths},
        {"weight",
         {{"kind", estimator.weight.kind == WeightFunction::Kind::box ? "box" : "gaussian"},
          {"size", estimator.weight.size}}},
        {"potential",
         {{"kind", estimator.potential.kind},
          {"strength", estimator.potential.strength},
          {"softening", estimator.potential.softening}}},
        {"kappa", std::isfinite(estimator.kappa) ? json(estimator.kappa) : json("auto")},
        {"kernel_resolution", estimator.kernel_resolution},
        {"kernel_range", estimator.kernel_range}};
    j["verify"] = {{"n_paths", verify.n_paths},     {"samples", verify.samples},
                   {"t", verify.t},                 {"split", verify.split},
                   {"ladder_step", verify.ladder_step}, {"moment_p", verify.moment_p},
                   {"sup_step", verify.sup_step},   {"epsilons", verify.epsilons}};
    j["constants"] = {{"b", constants.b},         {"b_prime", constants.b_prime}, {"c", constants.c},
                      {"c_prime", constants.c_prime}, {"c_upper", constants.c_upper},
                      {"c_theta", constants.c_theta}, {"c_star", constants.c_star},
                      {"alpha", constants.alpha}, {"theta", constants.theta}, {"s", constants.s},
                      {"eps", constants.eps}};
    j["asymptotics"] = {{"regime", asymptotics.regime}, {"grid", asymptotics.grid}};
    j["kato"] = {{"t_ladder", kato.t_ladder},
                 {"cap", kato.cap},
                 {"x_extent", kato.x_extent},
                 {"x_points", kato.x_points}};
    j["seed"] = seed;
    j["threads"] = threads;
    j["out"] = out;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.model.n_particles = read<int>(j, "model", "N");
    c.model.m_p = read<double>(j, "model", "m_p");
    c.model.m_b = read<double>(j, "model", "m_b");
    c.model.g = read<double>(j, "model", "g");
    c.model.sigma = read<double>(j, "model", "sigma");
    c.model.lambda = read_number_or_inf(j.at("model").at("lambda"), "model.lambda", kInf);

    c.grid.radial_panels = read<int>(j, "grid", "radial_panels");
    c.grid.radial_order = read<int>(j, "grid", "radial_order");
    c.grid.angular = read<int>(j, "grid", "angular");
    c.grid.r_max = read<double>(j, "grid", "r_max");
    c.grid.extent = read<double>(j, "grid", "extent");

    const auto kind = read<std::string>(j, "sampler", "kind");
    if (kind == "jumps")
        c.sampler.kind = PathSampler::Kind::jumps;
    else if (kind == "increments")
        c.sampler.kind = PathSampler::Kind::increments;
    else
        throw ConfigError("'sampler.kind' must be \"jumps\" or \"increments\"", "sampler.kind");
    c.sampler.epsilon = read<double>(j, "sampler", "epsilon");
    c.sampler.gaussian_correction = read<bool>(j, "sampler", "gaussian_correction");
    c.sampler.correction_step = read<double>(j, "sampler", "correction_step");
    c.sampler.dt = read<double>(j, "sampler", "dt");

    const json& e = j.at("estimator");
    c.estimator.t_ladder = read<std::vector<double>>(j, "estimator", "t_ladder");
    c.estimator.n_paths = read<long>(j, "estimator", "n_paths");
    const std::string wk = e.at("weight").at("kind").get<std::string>();
    if (wk != "box" && wk != "gaussian")
        throw ConfigError("'estimator.weight.kind' must be \"box\" or \"gaussian\"", "estimator.weight.kind");
    c.estimator.weight.kind = wk == "box" ? WeightFunction::Kind::box : WeightFunction::Kind::gaussian;
    c.estimator.weight.size = e.at("weight").at("size").get<double>();
    c.estimator.potential.kind = e.at("potential").at("kind").get<std::string>();
    c.estimator.potential.strength = e.at("potential").at("strength").get<double>();
    c.estimator.potential.softening = e.at("potential").at("softening").get<double>();
    c.estimator.potential.build();
    c.estimator.kappa = read_number_or_inf(e.at("kappa"), "estimator.kappa", std::nan(""));
    c.estimator.kernel_resolution = read<double>(j, "estimator", "kernel_resolution");
    c.estimator.kernel_range = read<double>(j, "estimator", "kernel_range");

    c.verify.n_paths = read<long>(j, "verify", "n_paths");
    c.verify.samples = read<long>(j, "verify", "samples");
    c.verify.t = read<double>(j, "verify", "t");
    c.verify.split = read<double>(j, "verify", "split");
    c.verify.ladder_step = read<double>(j, "verify", "ladder_step");
    c.verify.moment_p = read<double>(j, "verify", "moment_p");
    c.verify.sup_step = read<double>(j, "verify", "sup_step");
    c.verify.epsilons = read<std::vector<double>>(j, "verify", "epsilons");

    c.constants.b = read<double>(j, "constants", "b");
    c.constants.b_prime = read<double>(j, "constants", "b_prime");
    c.constants.c = read<double>(j, "constants", "c");
    c.constants.c_prime = read<double>(j, "constants", "c_prime");
    c.constants.c_upper = read<double>(j, "constants", "c_upper");
    c.constants.c_theta = read<double>(j, "constants", "c_theta");
    c.constants.c_star = read<double>(j, "constants", "c_star");
    c.constants.alpha = read<double>(j, "constants", "alpha");
    c.constants.theta = read<double>(j, "constants", "theta");
    c.constants.s = read<double>(j, "constants", "s");
    c.constants.eps = read<double>(j, "constants", "eps");

    c.asymptotics.regime = read<std::string>(j, "asymptotics", "regime");
    c.asymptotics.grid = read<std::vector<double>>(j, "asymptotics", "grid");

    c.kato.t_ladder = read<std::vector<double>>(j, "kato", "t_ladder");
    c.kato.cap = read<double>(j, "kato", "cap");
    c.kato.x_extent = read<double>(j, "kato", "x_extent");
    c.kato.x_points = read<int>(j, "kato", "x_points");

    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<int>();
    c.out = j.at("out").get<std::string>();

    try {
        c.model.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("model: ") + ex.what(), "model");
    }
    try {
        c.constants.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("constants: ") + ex.what(), "constants");
    }
    if (c.threads < 1) throw ConfigError("'threads' must be >= 1", "threads");
    if (c.estimator.n_paths < 2) throw ConfigError("'estimator.n_paths' must be >= 2", "estimator.n_paths");
    if (c.estimator.t_ladder.empty() || !std::is_sorted(c.estimator.t_ladder.begin(), c.estimator.t_ladder.end()))
        throw ConfigError("'estimator.t_ladder' must be non-empty and increasing", "estimator.t_ladder");
    return c;
}

RunConfig parse_config(const std::string& text) {
    json patch;
    try {
        patch = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what(), {}, line_of_offset(text, e.byte));
    }
    if (!patch.is_object()) throw ConfigError("config must be a JSON object", {}, 1);
    json base = RunConfig{}.to_json();
    merge(base, patch, "", text);
    return config_from_json(base);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1))
        parts.push_back(rest.substr(0, pos));
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
    json base = cfg.to_json();
    merge(base, patch, "", "");
    cfg = config_from_json(base);
}

}  // namespace nelson2d
