#pragma once

// Runs the rair CLI in-process and compares output directories.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rair::testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult invoke_cli(const std::vector<std::string>& args);

// relative path -> bytes for every file under dir except manifest.json
std::map<std::string, std::string> snapshot(const std::filesystem::path& dir);

// Empty when both runs produced identical files and manifests agree on
// everything except started_at, finished_at and workers.
std::string compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);

std::filesystem::path fresh_dir(const std::string& name);

}  // namespace rair::testing
