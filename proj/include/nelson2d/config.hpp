#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nelson2d/bounds.hpp"
#include "nelson2d/estimator.hpp"
#include "nelson2d/kspace.hpp"
#include "nelson2d/levy_path.hpp"
#include "nelson2d/params.hpp"
#include "nelson2d/potential.hpp"

namespace nelson2d {

struct PotentialConfig {
    std::string kind = "zero";  // zero | constant | harmonic | coulomb
    double strength = 0.0;
    double softening = 0.1;

    PotentialSpec build() const;
};

struct EstimatorConfig {
    std::vector<double> t_ladder{1.0, 2.0, 4.0, 8.0};
    long n_paths = 1000;
    WeightFunction weight{WeightFunction::Kind::gaussian, 5.0};
    PotentialConfig potential;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double kernel_resolution = 1.0;
    double kernel_range = 40.0;
};

// Knobs of the verification subcommands.
struct VerifyConfig {
    long n_paths = 100;
    long samples = 100000;  // density-check
    double t = 1.0;
    double split = 0.5;        // flow-verify: identities checked at split + shifted length t - split
    double ladder_step = 0.01;  // generator-verify
    double moment_p = 1.0;      // expmoment
    double sup_step = 0.01;     // expmoment
    std::vector<double> epsilons{0.3, 0.1, 0.03};  // action-verify
};

struct AsymptoticsConfig {
    std::string regime = "N";
    std::vector<double> grid{1e2, 1e3, 1e4, 1e5, 1e6};
};

struct KatoConfig {
    std::vector<double> t_ladder{0.01, 0.03, 0.1, 0.3, 1.0};
    double cap = 100.0;        // f = min(1/|y|, cap)
    double x_extent = 1.0;     // x grid on [-x_extent, x_extent]^2
    int x_points = 5;
};

struct RunConfig {
    ModelParams model;
    GridSpec grid;
    PathSampler sampler;
    EstimatorConfig estimator;
    VerifyConfig verify;
    BoundConstants constants;
    AsymptoticsConfig asymptotics;
    KatoConfig kato;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "run";

    EstimatorOptions estimator_options() const;
    nlohmann::json to_json() const;
};

// Carries the offending key path and, when known, the 1-based line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0);
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

// Every key of the input must exist in the defaults; values keep their default type.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// key is a dotted path (model.g); value is JSON, or a bare string when it does not parse.
void apply_override(RunConfig& cfg, const std::string& assignment);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace nelson2d
