#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

#ifndef NELSON2D_VERSION
#define NELSON2D_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nelson2d::ConfigError;
using nelson2d::RunConfig;
using nlohmann::json;
namespace cli = nelson2d::cli;

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;
    std::string regime;
};

void write_manifest(const fs::path& dir, const std::string& command, const json& config, double seconds, int code,
                    const json& summary, const std::string& error) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    json m;
    m["command"] = command;
    m["version"] = NELSON2D_VERSION;
    m["config"] = config;
    m["wall_time_s"] = seconds;
    m["exit_code"] = code;
    m["status"] = code == cli::ok ? "ok" : code == cli::verification_failure ? "verification_failure" : "usage_error";
    m["summary"] = summary;
    if (!error.empty()) m["error"] = error;
    std::ofstream f(dir / "manifest.json");
    f << m.dump(2) << "\n";
}

int execute(const std::string& name, const cli::CommandInfo& info, const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    fs::path out = opt.out.empty() ? fs::path("run") : fs::path(opt.out);
    json echo = nullptr;
    RunConfig cfg;
    try {
        if (!opt.config_path.empty()) cfg = nelson2d::load_config(opt.config_path);
        for (const auto& s : opt.sets) nelson2d::apply_override(cfg, s);
        if (opt.seed_given) cfg.seed = opt.seed;
        if (!opt.out.empty()) cfg.out = opt.out;
        if (const char* env = std::getenv("NELSON2D_THREADS")) nelson2d::apply_override(cfg, std::string("threads=") + env);
        out = cfg.out;
        echo = cfg.to_json();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        write_manifest(out, name, echo, elapsed(), cli::usage_error, json::object(), e.what());
        return cli::usage_error;
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << out << ": " << ec.message() << "\n";
        return cli::usage_error;
    }
    cli::CommandResult res;
    std::string error;
    try {
        res = info.run({cfg, out, opt.regime});
    } catch (const ConfigError& e) {
        error = e.what();
        res.exit_code = cli::usage_error;
    } catch (const std::invalid_argument& e) {
        error = e.what();
        res.exit_code = cli::usage_error;
    } catch (const std::domain_error& e) {
        error = e.what();
        res.exit_code = cli::usage_error;
    } catch (const std::exception& e) {
        error = e.what();
        res.exit_code = cli::usage_error;
    }
    if (!error.empty()) std::cerr << name << ": " << error << "\n";
    write_manifest(out, name, echo, elapsed(), res.exit_code, res.summary, error);
    std::cout << name << ": " << res.summary.dump() << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feynman-Kac laboratory for the renormalized 2D relativistic Nelson model"};
    app.set_version_flag("--version", std::string(NELSON2D_VERSION));
    app.require_subcommand(1);
    Options opt;
    std::string chosen;
    for (const auto& [name, info] : cli::commands()) {
        CLI::App* sub = app.add_subcommand(name, info.help);
        sub->add_option("-c,--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--set", opt.sets, "override one key, e.g. --set model.g=0.5")->take_all();
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& s) { opt.seed = s, opt.seed_given = true; }, "random seed");
        sub->add_option("-o,--out", opt.out, "output directory");
        if (name == "asymptotics") sub->add_option("--regime", opt.regime, "N, g, mb-massive or mb-massless");
        sub->callback([&chosen, n = name] { chosen = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::usage_error;
    }
    return execute(chosen, cli::commands().at(chosen), opt);
}
