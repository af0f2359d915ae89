#pragma once

// The `rair` command line: pattern, freeplay, recreate, analyze, oracle.

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/config.hpp"

namespace rair::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitOracleRefusal = 3;

// Built-in defaults per subcommand; identical to configs/<name>.cfg.
std::map<std::string, ConfigEntry> preset(const std::string& subcommand);

std::string sha256_hex(const std::filesystem::path& file);

// Writes `manifest.json` via a temporary file and rename.
void write_manifest_atomic(const std::filesystem::path& dir, const nlohmann::json& manifest);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rair::cli
