#pragma once

// Discrete 2D grid of individually actuated entities. One entity is actuated
// at a time for T consecutive steps, then control cycles to the next
// non-frozen entity. Moves into occupied or out-of-bounds cells are no-ops.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/reward.hpp"

namespace rair {

struct GridConfig {
  int width = 25;
  int height = 25;
  int num_entities = 16;
  int persistency_T = 10;
  int colors_c = 0;  // 0 = uncolored
  std::vector<bool> frozen_mask;  // empty = nothing frozen
  std::uint64_t seed = 0;
  bool diagonal_moves = true;

  void validate() const;  // throws ConfigError
  bool is_frozen(int entity) const { return !frozen_mask.empty() && frozen_mask[entity]; }
};

struct Cell {
  int col = 0;
  int row = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Cursor {
  int entity = 0;
  int remaining = 0;
  friend bool operator==(const Cursor&, const Cursor&) = default;
};

struct Configuration {
  std::vector<Cell> positions;
  std::vector<int> colors;  // color index per entity, empty when uncolored
  int num_colors = 0;
  std::vector<bool> frozen;
  Cursor cursor;
  std::uint64_t step_count = 0;

  std::size_t size() const { return positions.size(); }
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct GridAction {
  double x = 0.0;
  double y = 0.0;
};

// Threshold at +-1/3 onto {-1, 0, +1}; non-finite values map to 0.
int discretize_action(double raw);

// Next cursor under the round-robin schedule.
Cursor advance_cursor(const Cursor& c, const std::vector<bool>& frozen, int persistency_T);

class GridWorld {
 public:
  explicit GridWorld(GridConfig config);

  const GridConfig& config() const { return config_; }

  // Uniform random placement without collision, seeded by config.seed.
  Configuration reset() const;
  Configuration reset(std::uint64_t seed) const;

  // Builds a state from explicit cells; colors may be empty when uncolored.
  Configuration place(const std::vector<Cell>& positions, const std::vector<int>& colors = {}) const;

  Configuration step(const Configuration& state, GridAction action) const;
  // Returns true when the actuated entity changed cell.
  bool step_in_place(Configuration& state, GridAction action) const;

  bool in_bounds(Cell c) const { return c.col >= 0 && c.row >= 0 && c.col < config_.width && c.row < config_.height; }
  void check_state(const Configuration& state) const;  // throws Error on a broken invariant

 private:
  GridConfig config_;
};

std::vector<EntityView> entity_views(const Configuration& state);
void entity_views(const Configuration& state, std::vector<EntityView>& out);

nlohmann::json to_json(const Configuration& state);
Configuration configuration_from_json(const nlohmann::json& j);

// One char per cell: '.' empty, 'o' uncolored, 'A'.. colors, '#' frozen.
std::string render_ascii(const Configuration& state, int width, int height);
// Binary PPM (P6), cell_px pixels per cell.
std::vector<std::uint8_t> render_ppm(const Configuration& state, int width, int height, int cell_px = 8);

}  // namespace rair
