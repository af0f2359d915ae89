#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace rair {

using Rng = std::mt19937_64;

// Named sub-stream derivation. Every random draw in the library comes from an
// engine seeded by derive_seed(root, {labels...}); no global RNG state exists.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::initializer_list<std::uint64_t> path = {}) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Portable draws (the std distributions are implementation-defined).
double uniform01(Rng& rng);
double standard_normal(Rng& rng);
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace rair
