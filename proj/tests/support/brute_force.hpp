#pragma once

// Reference implementations written independently of the library: symbols are
// plain integer vectors, counted with std::map, entropy summed term by term.

#include <cstdint>
#include <string>
#include <vector>

#include "rair/gridworld.hpp"
#include "rair/reward.hpp"

namespace rair::testing {

struct PlainEntity {
  std::vector<double> coords;
  std::vector<int> color_bits;  // empty when uncolored
};

enum class PlainVariant { Direct, DirectPooled, RelPos, AbsRelPos, Distance };

long long plain_round(double value, double bin);

std::vector<std::vector<long long>> plain_symbols(const std::vector<PlainEntity>& entities, PlainVariant variant,
                                                  double bin, bool with_color);

double plain_entropy(const std::vector<std::vector<long long>>& symbols);

double plain_rair(const std::vector<PlainEntity>& entities, PlainVariant variant, double bin, bool with_color = false);

PlainVariant plain_variant_for(const PhiSpec& spec);

std::vector<PlainEntity> plain_entities(const std::vector<EntityView>& views);

// Brute-force optimum over every placement of n entities on a w x h grid.
double plain_grid_optimum(int width, int height, int n, PlainVariant variant);

}  // namespace rair::testing
