#include "rair/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rair/error.hpp"
#include "rair/rng.hpp"

namespace rair {

void GridConfig::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("env.width and env.height must be positive");
  if (num_entities <= 0) throw ConfigError("env.num_entities must be positive");
  if (static_cast<long long>(num_entities) > static_cast<long long>(width) * height) {
    throw ConfigError("env.num_entities exceeds the number of grid cells");
  }
  if (persistency_T < 1) throw ConfigError("env.persistency_T must be >= 1");
  if (colors_c < 0) throw ConfigError("env.colors_c must be >= 0");
  if (colors_c > 0) ColorCode::bits_for(colors_c);
  if (!frozen_mask.empty()) {
    if (static_cast<int>(frozen_mask.size()) != num_entities) {
      throw ConfigError("env.frozen mask length differs from env.num_entities");
    }
    if (std::all_of(frozen_mask.begin(), frozen_mask.end(), [](bool f) { return f; })) {
      throw ConfigError("at least one entity must not be frozen");
    }
  }
}

int discretize_action(double raw) {
  if (raw > 1.0 / 3.0) return 1;
  if (raw < -1.0 / 3.0) return -1;
  return 0;
}

Cursor advance_cursor(const Cursor& c, const std::vector<bool>& frozen, int persistency_T) {
  if (c.remaining > 1) return {c.entity, c.remaining - 1};
  const int n = static_cast<int>(frozen.size());
  int next = c.entity;
  for (int i = 0; i < n; ++i) {
    next = (next + 1) % n;
    if (!frozen[next]) break;
  }
  return {next, persistency_T};
}

GridWorld::GridWorld(GridConfig config) : config_(std::move(config)) { config_.validate(); }

Configuration GridWorld::reset() const { return reset(config_.seed); }

Configuration GridWorld::reset(std::uint64_t seed) const {
  const int cells = config_.width * config_.height;
  Rng rng(derive_seed(seed, "reset"));
  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < config_.num_entities; ++i) {
    const auto j = i + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cells - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<Cell> positions(config_.num_entities);
  for (int i = 0; i < config_.num_entities; ++i) positions[i] = {order[i] % config_.width, order[i] / config_.width};

  std::vector<int> colors;
  if (config_.colors_c > 0) {
    colors.resize(config_.num_entities);
    for (int i = 0; i < config_.num_entities; ++i) colors[i] = i % config_.colors_c;
    Rng crng(derive_seed(seed, "colors"));
    for (int i = config_.num_entities - 1; i > 0; --i) {
      std::swap(colors[i], colors[uniform_index(crng, static_cast<std::uint64_t>(i + 1))]);
    }
  }
  return place(positions, colors);
}

Configuration GridWorld::place(const std::vector<Cell>& positions, const std::vector<int>& colors) const {
  if (static_cast<int>(positions.size()) != config_.num_entities) {
    throw Error("placement has " + std::to_string(positions.size()) + " entities, expected " +
                std::to_string(config_.num_entities));
  }
  Configuration s;
  s.positions = positions;
  s.num_colors = config_.colors_c;
  if (config_.colors_c > 0) {
    if (colors.size() != positions.size()) throw Error("colored environment needs one color per entity");
    s.colors = colors;
  } else if (!colors.empty()) {
    throw Error("colors given for an uncolored environment");
  }
  s.frozen.assign(positions.size(), false);
  for (int i = 0; i < config_.num_entities; ++i) s.frozen[i] = config_.is_frozen(i);
  int first = 0;
  while (s.frozen[first]) ++first;
  s.cursor = {first, config_.persistency_T};
  check_state(s);
  return s;
}

void GridWorld::check_state(const Configuration& s) const {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!in_bounds(s.positions[i])) throw Error("entity " + std::to_string(i) + " outside the grid");
    for (std::size_t j = 0; j < i; ++j) {
      if (s.positions[i] == s.positions[j]) {
        throw Error("entities " + std::to_string(j) + " and " + std::to_string(i) + " share a cell");
      }
    }
    if (!s.colors.empty() && (s.colors[i] < 0 || s.colors[i] >= s.num_colors)) {
      throw Error("entity " + std::to_string(i) + " has an invalid color");
    }
  }
  if (s.cursor.entity < 0 || s.cursor.entity >= static_cast<int>(s.size()) || s.frozen[s.cursor.entity]) {
    throw Error("actuation cursor must point at a non-frozen entity");
  }
}

bool GridWorld::step_in_place(Configuration& state, GridAction action) const {
  int dx = discretize_action(action.x);
  int dy = discretize_action(action.y);
  if (!config_.diagonal_moves && dx != 0 && dy != 0) {
    if (std::abs(action.x) >= std::abs(action.y)) dy = 0;
    else dx = 0;
  }
  bool moved = false;
  const int e = state.cursor.entity;
  if ((dx != 0 || dy != 0) && !state.frozen[e]) {
    const Cell target{state.positions[e].col + dx, state.positions[e].row + dy};
    if (in_bounds(target) &&
        std::find(state.positions.begin(), state.positions.end(), target) == state.positions.end()) {
      state.positions[e] = target;
      moved = true;
    }
  }
  state.cursor = advance_cursor(state.cursor, state.frozen, config_.persistency_T);
  ++state.step_count;
  return moved;
}

Configuration GridWorld::step(const Configuration& state, GridAction action) const {
  Configuration next = state;
  step_in_place(next, action);
  return next;
}

void entity_views(const Configuration& state, std::vector<EntityView>& out) {
  out.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    EntityView v;
    v.position = {static_cast<double>(state.positions[i].col), static_cast<double>(state.positions[i].row), 0.0};
    v.dims = 2;
    if (!state.colors.empty()) v.color = ColorCode::encode(state.colors[i], state.num_colors);
    v.frozen = state.frozen[i];
    out[i] = v;
  }
}

std::vector<EntityView> entity_views(const Configuration& state) {
  std::vector<EntityView> out;
  entity_views(state, out);
  return out;
}

nlohmann::json to_json(const Configuration& s) {
  nlohmann::json positions = nlohmann::json::array();
  for (const auto& c : s.positions) positions.push_back({c.col, c.row});
  nlohmann::json j;
  j["positions"] = positions;
  j["colors"] = s.colors.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.colors);
  j["num_colors"] = s.num_colors;
  j["frozen"] = std::vector<bool>(s.frozen.begin(), s.frozen.end());
  j["cursor"] = {{"entity", s.cursor.entity}, {"remaining", s.cursor.remaining}};
  j["step"] = s.step_count;
  return j;
}

Configuration configuration_from_json(const nlohmann::json& j) {
  Configuration s;
  for (const auto& p : j.at("positions")) s.positions.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  if (!j.at("colors").is_null()) s.colors = j.at("colors").get<std::vector<int>>();
  s.num_colors = j.value("num_colors", 0);
  s.frozen = j.at("frozen").get<std::vector<bool>>();
  s.cursor = {j.at("cursor").at("entity").get<int>(), j.at("cursor").at("remaining").get<int>()};
  s.step_count = j.at("step").get<std::uint64_t>();
  if (s.frozen.size() != s.positions.size()) throw Error("frozen list length differs from positions");
  return s;
}

}  // namespace rair
