#include "fixtures.hpp"

namespace rair::testing {

std::vector<EntityView> random_views(Rng& rng, int n, int side, bool lattice, int num_colors) {
  std::vector<EntityView> out;
  for (int i = 0; i < n; ++i) {
    double x = 0.0;
    double y = 0.0;
    if (lattice) {
      x = static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(side)));
      y = static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(side)));
    } else {
      x = (2.0 * uniform01(rng) - 1.0) * side;
      y = (2.0 * uniform01(rng) - 1.0) * side;
    }
    if (num_colors > 1) {
      const int c = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(num_colors)));
      out.push_back(EntityView::at(x, y, ColorCode::encode(c, num_colors)));
    } else {
      out.push_back(EntityView::at(x, y));
    }
  }
  return out;
}

std::vector<PhiSpec> all_phi_variants(double bin_size) {
  return {PhiSpec::direct(bin_size, true), PhiSpec::direct(bin_size, false),
          PhiSpec::relational(PhiVariant::RelativePosition, bin_size),
          PhiSpec::relational(PhiVariant::AbsRelativePosition, bin_size),
          PhiSpec::relational(PhiVariant::EuclideanDistance, bin_size)};
}

}  // namespace rair::testing
