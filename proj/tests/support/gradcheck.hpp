#pragma once

#include <cstdint>
#include <vector>

namespace rair::testing {

// Max relative error between backprop and central finite differences (step h)
// over every parameter of a freshly initialized MLP with the given widths.
double gradient_check(const std::vector<int>& widths, std::uint64_t seed, int batch = 3, double h = 1e-5);

}  // namespace rair::testing
