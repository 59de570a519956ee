#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "nelson2d/config.hpp"

namespace nelson2d::cli {

enum ExitCode { ok = 0, usage_error = 1, verification_failure = 2 };

struct CommandResult {
    int exit_code = ok;
    nlohmann::json summary = nlohmann::json::object();
};

struct CommandContext {
    RunConfig config;
    std::filesystem::path out;
    std::string regime;  // asymptotics only; empty keeps the config value
};

using Command = CommandResult (*)(const CommandContext&);

struct CommandInfo {
    Command run;
    const char* help;
};

const std::map<std::string, CommandInfo>& commands();

}  // namespace nelson2d::cli
