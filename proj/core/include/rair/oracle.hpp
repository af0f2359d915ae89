#pragma once

// Exhaustive global optimum of the regularity reward over all placements of
// N indistinguishable entities on a small grid.

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/gridworld.hpp"
#include "rair/reward.hpp"

namespace rair {

inline constexpr int kOracleMaxEntities = 4;
inline constexpr int kOracleMaxSide = 6;

struct OracleResult {
  double optimum = 0.0;
  std::uint64_t placements = 0;
  std::vector<std::vector<Cell>> argmax;  // lexicographic order of cell indices

  nlohmann::json to_json() const;
};

// Number of unordered placements, saturating at UINT64_MAX.
std::uint64_t placement_count(int width, int height, int num_entities);

// Throws OracleRefusal "oracle instance too large" beyond 4 entities or a 6x6 grid.
OracleResult exhaustive_optimum(int width, int height, int num_entities, const PhiSpec& phi);

}  // namespace rair
