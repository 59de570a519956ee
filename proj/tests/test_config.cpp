#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nelson2d/config.hpp"
#include "nelson2d/csv.hpp"

using namespace nelson2d;

TEST_CASE("defaults") {
    const RunConfig c = parse_config("{}");
    CHECK(c.model.n_particles == 1);
    CHECK(std::isinf(c.model.lambda));
    CHECK(std::isnan(c.estimator.kappa));
    CHECK(c.threads == 1);
    CHECK(c.seed == 1);
    CHECK(c.estimator.t_ladder.size() == 4);
    CHECK(c.sampler.kind == PathSampler::Kind::jumps);
}

TEST_CASE("values are read and echoed") {
    const RunConfig c = parse_config(R"({
  "model": {"N": 3, "g": 0.5, "lambda": 20, "m_p": 0},
  "sampler": {"kind": "increments", "dt": 0.02},
  "estimator": {"kappa": 4.5, "weight": {"kind": "box", "size": 2}, "potential": {"kind": "harmonic", "strength": 0.3}},
  "seed": 99
})");
    CHECK(c.model.n_particles == 3);
    CHECK(c.model.g == 0.5);
    CHECK(c.model.lambda == 20.0);
    CHECK(c.model.m_p == 0.0);
    CHECK(c.sampler.kind == PathSampler::Kind::increments);
    CHECK(c.sampler.dt == 0.02);
    CHECK(c.estimator.kappa == 4.5);
    CHECK(c.estimator.weight.kind == WeightFunction::Kind::box);
    CHECK(c.seed == 99);
    const auto v = c.estimator.potential.build();
    CHECK(v({{1.0, 1.0}}) == doctest::Approx(0.6));
    const auto back = config_from_json(c.to_json());
    CHECK(back.model.n_particles == 3);
    CHECK(back.model.lambda == 20.0);
    CHECK(back.estimator.kappa == 4.5);
    CHECK(std::isinf(config_from_json(parse_config("{}").to_json()).model.lambda));
    const auto auto_kappa = parse_config(R"({"model": {"lambda": "inf"}, "estimator": {"kappa": "auto"}})");
    CHECK(std::isinf(auto_kappa.model.lambda));
    CHECK(std::isnan(auto_kappa.estimator_options().kappa));
}

TEST_CASE("unknown keys report the line") {
    try {
        parse_config("{\n  \"model\": {\n    \"mass\": 1\n  }\n}");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(e.key() == "model.mass");
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("type and range errors") {
    CHECK_THROWS_AS(parse_config(R"({"model": {"g": "big"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"N": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"threads": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"estimator": {"t_ladder": [2, 1]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"constants": {"theta": 1.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sampler": {"kind": "teleport"}})"), ConfigError);
    try {
        parse_config("{\n  \"model\": {\n    \"g\": 1,\n  }\n}");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() >= 3);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("overrides") {
    RunConfig c = parse_config("{}");
    apply_override(c, "model.g=2.5");
    apply_override(c, "sampler.kind=increments");
    apply_override(c, "estimator.t_ladder=[0.5, 1]");
    apply_override(c, "model.lambda=inf");
    CHECK(c.model.g == 2.5);
    CHECK(c.sampler.kind == PathSampler::Kind::increments);
    CHECK(c.estimator.t_ladder == std::vector<double>{0.5, 1.0});
    CHECK(std::isinf(c.model.lambda));
    CHECK_THROWS_AS(apply_override(c, "model.spin=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "no_equals_sign"), ConfigError);
}

TEST_CASE("CSV quoting round trip") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(std::nan("")) == "nan");
    CHECK(csv_number(-HUGE_VAL) == "-inf");
    std::ostringstream s;
    CsvWriter w(s);
    w.row(std::vector<std::string>{"x", "multi\nline", "q\"uote"});
    w.row(std::vector<double>{1.0, 0.1, -2.5e-300});
    CHECK(s.str().find("\r\n") != std::string::npos);
    const auto rows = parse_csv(s.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][1] == "multi\nline");
    CHECK(rows[0][2] == "q\"uote");
    CHECK(std::stod(rows[1][1]) == 0.1);
    CHECK(std::stod(rows[1][2]) == -2.5e-300);
    CHECK_THROWS(parse_csv("\"open"));
}
