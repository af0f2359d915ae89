#pragma once

// Regularity reward: symbol multisets built from entity configurations and
// their negative Shannon entropy.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rair {

inline constexpr std::size_t kMaxCoords = 3;
inline constexpr std::size_t kMaxColorBits = 4;
inline constexpr std::size_t kMaxSymbolWidth = kMaxCoords + kMaxColorBits;

// Symbol namespaces. Axis-tagged direct symbols use the axis index as tag.
inline constexpr std::uint8_t kTagPooled = 0;
inline constexpr std::uint8_t kTagColor = 0xC0;
inline constexpr std::uint8_t kTagPair = 0xF0;
inline constexpr std::uint8_t kTagColorPair = 0xF1;

// Binary color encoding of length ceil(log2 c).
struct ColorCode {
  std::array<std::uint8_t, kMaxColorBits> bits{};
  std::uint8_t length = 0;

  static ColorCode encode(int color_index, int num_colors);
  static int bits_for(int num_colors);
  friend bool operator==(const ColorCode&, const ColorCode&) = default;
};

struct EntityView {
  std::array<double, kMaxCoords> position{};
  std::uint8_t dims = 0;
  std::optional<ColorCode> color;
  bool frozen = false;

  static EntityView at(double x, double y);
  static EntityView at(double x, double y, ColorCode color);
  double coord(std::size_t i) const { return position[i]; }
};

enum class PhiVariant { Direct, RelativePosition, AbsRelativePosition, EuclideanDistance };

std::string to_string(PhiVariant v);
PhiVariant phi_variant_from_string(const std::string& s);

struct PhiSpec {
  PhiVariant variant = PhiVariant::AbsRelativePosition;
  int order_k = 2;
  double bin_size = 1.0;
  std::vector<int> subspace{0, 1};
  bool include_color = false;
  bool axis_tagged = true;  // Direct only; false pools all axes into one namespace

  static PhiSpec direct(double bin_size = 1.0, bool axis_tagged = true);
  static PhiSpec relational(PhiVariant variant, double bin_size = 1.0);

  // Throws rair::ConfigError. `dims` is the entity dimensionality when known.
  void validate(std::optional<std::size_t> dims = std::nullopt) const;
};

struct Symbol {
  std::uint8_t tag = 0;
  std::uint8_t width = 0;
  std::array<std::int32_t, kMaxSymbolWidth> values{};  // unused slots stay zero

  std::span<const std::int32_t> view() const { return {values.data(), width}; }

  // Lexicographic by (tag, values).
  friend auto operator<=>(const Symbol& a, const Symbol& b) {
    if (auto c = a.tag <=> b.tag; c != 0) return c;
    if (auto c = a.width <=> b.width; c != 0) return c;
    return a.values <=> b.values;
  }
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

Symbol make_symbol(std::uint8_t tag, std::initializer_list<std::int32_t> values);

// Multiset of symbols as sorted (symbol, multiplicity) entries.
class SymbolHistogram {
 public:
  SymbolHistogram() = default;
  static SymbolHistogram from_symbols(std::vector<Symbol> symbols);

  const std::vector<std::pair<Symbol, std::uint64_t>>& entries() const { return entries_; }
  std::uint64_t total() const { return total_; }
  std::size_t unique() const { return entries_.size(); }
  std::uint64_t count(const Symbol& s) const;
  bool empty() const { return total_ == 0; }

  friend bool operator==(const SymbolHistogram&, const SymbolHistogram&) = default;

 private:
  std::vector<std::pair<Symbol, std::uint64_t>> entries_;
  std::uint64_t total_ = 0;
};

// Round-half-away-from-zero of value / bin_size.
std::int32_t discretize(double value, double bin_size);

SymbolHistogram build_multiset_direct(std::span<const EntityView> entities, const PhiSpec& spec);
SymbolHistogram build_multiset_relational(std::span<const EntityView> entities, const PhiSpec& spec);
SymbolHistogram build_multiset(std::span<const EntityView> entities, const PhiSpec& spec);

// Appends the raw symbol list (unsorted) for `entities` under `spec`.
void emit_symbols(std::span<const EntityView> entities, const PhiSpec& spec, std::vector<Symbol>& out);

// Shannon entropy in nats.
double entropy(const SymbolHistogram& h);

// -entropy(build_multiset(entities, spec)); never positive.
double rair_reward(std::span<const EntityView> entities, const PhiSpec& spec);

}  // namespace rair
