#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lagcoup/runner/plan.hpp"

namespace lagcoup {

// Declarative experiment description parsed from a JSON config file. The
// schema is documented in the README; unknown keys are rejected.
struct Config {
    ExperimentPlan plan;
    std::filesystem::path out_dir = ".";
    std::string prefix = "run";
    std::uint64_t config_hash = 0; // FNV-1a over the canonical config text
};

Config parse_config_text(const std::string& text);
Config load_config_file(const std::filesystem::path& path);

} // namespace lagcoup
