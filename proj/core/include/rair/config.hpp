#pragma once

// Flat line-oriented configuration: `section.key = value`, '#' comments,
// overridable by `key=value` strings. Unknown keys are errors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rair/freeplay.hpp"
#include "rair/gridworld.hpp"
#include "rair/planner.hpp"
#include "rair/reward.hpp"
#include "rair/table1.hpp"

namespace rair {

struct RunConfig {
  std::uint64_t seed = 0;
  int episode_length = 200;
  int frame_every = 0;  // 0 = final frame only
  int cell_px = 12;

  GridConfig env;
  PhiSpec phi = PhiSpec::relational(PhiVariant::AbsRelativePosition, 1.0);
  PlannerConfig planner;
  EnsembleConfig ensemble;

  int fp_iterations = 30;
  int fp_rollouts_per_iter = 10;
  int fp_episode_length = 50;
  int fp_checkpoint_every = 10;
  double lambda = 0.1;
  IntrinsicComponents components = IntrinsicComponents::Combined;

  std::vector<Cell> template_cells{{2, 2}, {4, 2}, {6, 2}};
  int movable = 3;
  std::vector<int> spawn{0, 6, 12, 12};  // col0,row0,col1,row1
  std::vector<Cell> movable_start;
  int rc_rollouts = 15;
  int rc_episode_length = 100;

  int oracle_width = 4;
  int oracle_height = 4;
  int oracle_entities = 3;

  int analyze_probes = 24;
  int analyze_trials = 5;

  // Canonical flat dump of every key, sorted.
  std::map<std::string, std::string> flatten() const;

  FreePlayConfig freeplay_config() const;
  IntrinsicSpec intrinsic_spec() const;
  RecreationConfig recreation_config() const;
  TableOptions table_options() const;
};

struct ConfigEntry {
  std::string value;
  std::string origin;  // "file:line" or "--set"
};

// Parses text into key -> entry; syntax errors throw ConfigError with origin.
std::map<std::string, ConfigEntry> parse_config_text(const std::string& text, const std::string& source);
std::map<std::string, ConfigEntry> load_config_file(const std::filesystem::path& path);

// Applies "key=value" overrides in order.
void apply_overrides(std::map<std::string, ConfigEntry>& entries, const std::vector<std::string>& overrides);

// Resolves entries over defaults; unknown keys and bad values throw
// ConfigError naming the origin and key.
RunConfig resolve_config(const std::map<std::string, ConfigEntry>& entries);

std::vector<std::string> known_config_keys();

std::string format_cells(const std::vector<Cell>& cells);
std::vector<Cell> parse_cells(const std::string& text);

}  // namespace rair
