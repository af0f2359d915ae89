#include "rair/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rair/error.hpp"

namespace rair {

namespace {

constexpr double kTieTolerance = 1e-12;

}  // namespace

std::uint64_t placement_count(int width, int height, int num_entities) {
  if (width <= 0 || height <= 0 || num_entities < 0) return 0;
  const auto cells = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  if (static_cast<std::uint64_t>(num_entities) > cells) return 0;
  std::uint64_t c = 1;
  for (int i = 1; i <= num_entities; ++i) {
    // c * (cells - i + 1) / i stays integral at every step
    const std::uint64_t num = cells - static_cast<std::uint64_t>(i) + 1;
    if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

nlohmann::json OracleResult::to_json() const {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& cfg : argmax) {
    nlohmann::json cells = nlohmann::json::array();
    for (const Cell c : cfg) cells.push_back({c.col, c.row});
    configs.push_back(cells);
  }
  return {{"optimum", optimum}, {"placements", placements}, {"argmax_count", argmax.size()}, {"argmax", configs}};
}

OracleResult exhaustive_optimum(int width, int height, int num_entities, const PhiSpec& phi) {
  if (width <= 0 || height <= 0 || num_entities <= 0) throw Error("oracle grid and entity count must be positive");
  const std::uint64_t count = placement_count(width, height, num_entities);
  if (num_entities > kOracleMaxEntities || width > kOracleMaxSide || height > kOracleMaxSide) {
    throw OracleRefusal("oracle instance too large: refused to enumerate " + std::to_string(count) +
                            " placements (limit " + std::to_string(kOracleMaxEntities) + " entities on " +
                            std::to_string(kOracleMaxSide) + "x" + std::to_string(kOracleMaxSide) + ")",
                        count);
  }
  if (count == 0) throw Error("more entities than grid cells");
  phi.validate(2);

  const int cells = width * height;
  OracleResult result;
  result.optimum = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(num_entities);
  for (int i = 0; i < num_entities; ++i) idx[i] = i;
  std::vector<EntityView> views(num_entities);
  while (true) {
    for (int i = 0; i < num_entities; ++i) views[i] = EntityView::at(idx[i] % width, idx[i] / width);
    const double r = rair_reward(views, phi);
    ++result.placements;
    if (r > result.optimum + kTieTolerance) {
      result.optimum = r;
      result.argmax.clear();
    }
    if (std::abs(r - result.optimum) <= kTieTolerance) {
      std::vector<Cell> cfg;
      for (int i : idx) cfg.push_back({i % width, i / width});
      result.argmax.push_back(std::move(cfg));
    }
    // next combination in lexicographic order
    int k = num_entities - 1;
    while (k >= 0 && idx[k] == cells - num_entities + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < num_entities; ++j) idx[j] = idx[j - 1] + 1;
  }
  return result;
}

}  // namespace rair
