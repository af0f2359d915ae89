#pragma once

#include <cstdint>
#include <vector>

#include "rair/reward.hpp"
#include "rair/rng.hpp"

namespace rair::testing {

// n random 2D views; integer coordinates in [0, side) when `lattice`, else
// continuous in [-side, side). num_colors > 1 attaches color codes.
std::vector<EntityView> random_views(Rng& rng, int n, int side, bool lattice, int num_colors = 0);

std::vector<PhiSpec> all_phi_variants(double bin_size = 1.0);

}  // namespace rair::testing
