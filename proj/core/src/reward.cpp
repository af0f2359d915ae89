#include "rair/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rair/error.hpp"

namespace rair {

namespace {

std::size_t required_dims(const PhiSpec& spec) {
  int hi = -1;
  for (int j : spec.subspace) hi = std::max(hi, j);
  return static_cast<std::size_t>(hi + 1);
}

void check_entities(std::span<const EntityView> entities, const PhiSpec& spec) {
  const std::size_t need = required_dims(spec);
  for (const auto& e : entities) {
    if (e.dims < need) throw Error("entity dimensionality smaller than phi subspace");
    if (spec.include_color && !e.color) throw Error("include_color requires colored entities");
  }
}

std::uint8_t color_width(std::span<const EntityView> entities) {
  return entities.empty() || !entities.front().color ? 0 : entities.front().color->length;
}

}  // namespace

ColorCode ColorCode::encode(int color_index, int num_colors) {
  if (num_colors < 1) throw Error("color encoding needs at least one color");
  if (color_index < 0 || color_index >= num_colors) throw Error("color index out of range");
  ColorCode code;
  code.length = static_cast<std::uint8_t>(bits_for(num_colors));
  for (std::uint8_t b = 0; b < code.length; ++b) {
    // most significant bit first
    code.bits[b] = static_cast<std::uint8_t>((color_index >> (code.length - 1 - b)) & 1);
  }
  return code;
}

int ColorCode::bits_for(int num_colors) {
  int bits = 0;
  while ((1 << bits) < num_colors) ++bits;
  if (bits > static_cast<int>(kMaxColorBits)) throw Error("too many colors for the color encoding");
  return bits;
}

EntityView EntityView::at(double x, double y) {
  EntityView v;
  v.position = {x, y, 0.0};
  v.dims = 2;
  return v;
}

EntityView EntityView::at(double x, double y, ColorCode color) {
  EntityView v = at(x, y);
  v.color = color;
  return v;
}

std::string to_string(PhiVariant v) {
  switch (v) {
    case PhiVariant::Direct: return "direct";
    case PhiVariant::RelativePosition: return "relative_position";
    case PhiVariant::AbsRelativePosition: return "abs_relative_position";
    case PhiVariant::EuclideanDistance: return "euclidean_distance";
  }
  return "unknown";
}

PhiVariant phi_variant_from_string(const std::string& s) {
  if (s == "direct") return PhiVariant::Direct;
  if (s == "relative_position" || s == "rel_pos") return PhiVariant::RelativePosition;
  if (s == "abs_relative_position" || s == "abs_rel_pos") return PhiVariant::AbsRelativePosition;
  if (s == "euclidean_distance" || s == "distance") return PhiVariant::EuclideanDistance;
  throw ConfigError("unknown phi variant '" + s + "'");
}

PhiSpec PhiSpec::direct(double bin_size, bool axis_tagged) {
  PhiSpec s;
  s.variant = PhiVariant::Direct;
  s.order_k = 1;
  s.bin_size = bin_size;
  s.axis_tagged = axis_tagged;
  return s;
}

PhiSpec PhiSpec::relational(PhiVariant variant, double bin_size) {
  PhiSpec s;
  s.variant = variant;
  s.order_k = variant == PhiVariant::Direct ? 1 : 2;
  s.bin_size = bin_size;
  return s;
}

void PhiSpec::validate(std::optional<std::size_t> dims) const {
  if (variant == PhiVariant::Direct && order_k != 1) throw ConfigError("direct phi requires order_k = 1");
  if (variant != PhiVariant::Direct && order_k != 2) {
    throw ConfigError("relational phi supports order_k = 2 only (got " + std::to_string(order_k) + ")");
  }
  if (!(bin_size > 0.0) || !std::isfinite(bin_size)) throw ConfigError("bin_size must be a positive finite number");
  if (subspace.empty()) throw ConfigError("phi subspace must not be empty");
  if (subspace.size() > kMaxCoords) throw ConfigError("phi subspace has too many coordinates");
  for (std::size_t i = 0; i < subspace.size(); ++i) {
    const int j = subspace[i];
    if (j < 0 || j >= static_cast<int>(kMaxCoords)) throw ConfigError("phi subspace index out of range");
    if (dims && static_cast<std::size_t>(j) >= *dims) {
      throw ConfigError("phi subspace index " + std::to_string(j) + " exceeds entity dimensionality");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (subspace[k] == j) throw ConfigError("phi subspace has duplicate indices");
    }
  }
}

Symbol make_symbol(std::uint8_t tag, std::initializer_list<std::int32_t> values) {
  Symbol s;
  s.tag = tag;
  if (values.size() > kMaxSymbolWidth) throw Error("symbol too wide");
  s.width = static_cast<std::uint8_t>(values.size());
  std::copy(values.begin(), values.end(), s.values.begin());
  return s;
}

SymbolHistogram SymbolHistogram::from_symbols(std::vector<Symbol> symbols) {
  std::sort(symbols.begin(), symbols.end());
  SymbolHistogram h;
  for (const Symbol& s : symbols) {
    if (!h.entries_.empty() && h.entries_.back().first == s) {
      ++h.entries_.back().second;
    } else {
      h.entries_.emplace_back(s, 1);
    }
  }
  h.total_ = symbols.size();
  return h;
}

std::uint64_t SymbolHistogram::count(const Symbol& s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const auto& e, const Symbol& key) { return e.first < key; });
  return (it != entries_.end() && it->first == s) ? it->second : 0;
}

std::int32_t discretize(double value, double bin_size) {
  if (!std::isfinite(value)) throw Error("non-finite input");
  if (!(bin_size > 0.0) || !std::isfinite(bin_size)) throw Error("bin_size must be positive");
  const double r = std::round(value / bin_size);
  if (r > std::numeric_limits<std::int32_t>::max() || r < std::numeric_limits<std::int32_t>::min()) {
    throw Error("discretized value out of range");
  }
  return static_cast<std::int32_t>(r);
}

void emit_symbols(std::span<const EntityView> entities, const PhiSpec& spec, std::vector<Symbol>& out) {
  const double b = spec.bin_size;
  if (spec.variant == PhiVariant::Direct) {
    if (entities.empty()) throw Error("no entities");
    check_entities(entities, spec);
    for (const auto& e : entities) {
      for (int j : spec.subspace) {
        Symbol s;
        s.tag = spec.axis_tagged ? static_cast<std::uint8_t>(j) : kTagPooled;
        s.width = 1;
        s.values[0] = discretize(e.coord(static_cast<std::size_t>(j)), b);
        out.push_back(s);
      }
      if (spec.include_color) {
        Symbol s;
        s.tag = kTagColor;
        s.width = e.color->length;
        for (std::uint8_t k = 0; k < s.width; ++k) s.values[k] = e.color->bits[k];
        out.push_back(s);
      }
    }
    return;
  }

  if (entities.size() < 2) throw Error("relational RaIR needs ≥2 entities");
  check_entities(entities, spec);
  const std::uint8_t cbits = spec.include_color ? color_width(entities) : 0;
  const std::uint8_t tag = spec.include_color ? kTagColorPair : kTagPair;
  const std::size_t n = entities.size();

  auto fill_color = [&](Symbol& s, const EntityView& a, const EntityView& c) {
    for (std::uint8_t k = 0; k < cbits; ++k) {
      s.values[s.width + k] = std::abs(static_cast<int>(a.color->bits[k]) - static_cast<int>(c.color->bits[k]));
    }
    s.width = static_cast<std::uint8_t>(s.width + cbits);
  };

  switch (spec.variant) {
    case PhiVariant::RelativePosition:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          if (i == k) continue;
          Symbol s;
          s.tag = tag;
          for (int j : spec.subspace) {
            const auto jj = static_cast<std::size_t>(j);
            s.values[s.width++] = discretize(entities[i].coord(jj) - entities[k].coord(jj), b);
          }
          if (cbits) fill_color(s, entities[i], entities[k]);
          out.push_back(s);
        }
      }
      break;
    case PhiVariant::AbsRelativePosition:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
          Symbol s;
          s.tag = tag;
          for (int j : spec.subspace) {
            const auto jj = static_cast<std::size_t>(j);
            s.values[s.width++] = std::abs(discretize(entities[i].coord(jj) - entities[k].coord(jj), b));
          }
          if (cbits) fill_color(s, entities[i], entities[k]);
          out.push_back(s);
        }
      }
      break;
    case PhiVariant::EuclideanDistance:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
          double sq = 0.0;
          for (int j : spec.subspace) {
            const auto jj = static_cast<std::size_t>(j);
            const double d = entities[i].coord(jj) - entities[k].coord(jj);
            sq += d * d;
          }
          Symbol s;
          s.tag = tag;
          s.values[s.width++] = discretize(std::sqrt(sq), b);
          if (cbits) fill_color(s, entities[i], entities[k]);
          out.push_back(s);
        }
      }
      break;
    case PhiVariant::Direct:
      break;
  }
}

SymbolHistogram build_multiset_direct(std::span<const EntityView> entities, const PhiSpec& spec) {
  if (spec.variant != PhiVariant::Direct) throw Error("build_multiset_direct needs the direct variant");
  spec.validate();
  std::vector<Symbol> symbols;
  symbols.reserve(entities.size() * (spec.subspace.size() + 1));
  emit_symbols(entities, spec, symbols);
  return SymbolHistogram::from_symbols(std::move(symbols));
}

SymbolHistogram build_multiset_relational(std::span<const EntityView> entities, const PhiSpec& spec) {
  if (spec.variant == PhiVariant::Direct) throw Error("build_multiset_relational needs a relational variant");
  spec.validate();
  std::vector<Symbol> symbols;
  symbols.reserve(entities.size() * entities.size());
  emit_symbols(entities, spec, symbols);
  return SymbolHistogram::from_symbols(std::move(symbols));
}

SymbolHistogram build_multiset(std::span<const EntityView> entities, const PhiSpec& spec) {
  return spec.variant == PhiVariant::Direct ? build_multiset_direct(entities, spec)
                                            : build_multiset_relational(entities, spec);
}

double entropy(const SymbolHistogram& h) {
  if (h.total() == 0) throw Error("empty multiset");
  const double total = static_cast<double>(h.total());
  double acc = 0.0;
  for (const auto& [sym, m] : h.entries()) {
    const double p = static_cast<double>(m) / total;
    acc -= p * std::log(p);
  }
  return acc < 0.0 ? 0.0 : acc;
}

namespace {

// Entropy straight from a sorted run of keys; same arithmetic as entropy().
template <typename It>
double entropy_of_sorted(It first, It last) {
  const double total = static_cast<double>(last - first);
  double acc = 0.0;
  while (first != last) {
    It run_end = first;
    while (run_end != last && *run_end == *first) ++run_end;
    const double p = static_cast<double>(run_end - first) / total;
    acc -= p * std::log(p);
    first = run_end;
  }
  return acc < 0.0 ? 0.0 : acc;
}

// Packs a symbol into 64 bits when it is narrow enough; injective on its domain.
bool pack_symbol(const Symbol& s, std::uint64_t& key) {
  if (s.width > 3) return false;
  std::uint64_t k = s.tag;
  for (std::uint8_t i = 0; i < 3; ++i) {
    const std::int32_t v = i < s.width ? s.values[i] : 0;
    if (v < -32768 || v > 32767) return false;
    k = (k << 16) | static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
  }
  key = k;
  return true;
}

}  // namespace

double rair_reward(std::span<const EntityView> entities, const PhiSpec& spec) {
  spec.validate();
  thread_local std::vector<Symbol> symbols;
  thread_local std::vector<std::uint64_t> keys;
  symbols.clear();
  emit_symbols(entities, spec, symbols);
  if (symbols.empty()) throw Error("empty multiset");

  keys.clear();
  bool packed = true;
  for (const Symbol& s : symbols) {
    std::uint64_t k;
    if (!pack_symbol(s, k)) {
      packed = false;
      break;
    }
    keys.push_back(k);
  }
  if (packed) {
    std::sort(keys.begin(), keys.end());
    return 0.0 - entropy_of_sorted(keys.begin(), keys.end());
  }
  std::sort(symbols.begin(), symbols.end());
  return 0.0 - entropy_of_sorted(symbols.begin(), symbols.end());
}

}  // namespace rair
