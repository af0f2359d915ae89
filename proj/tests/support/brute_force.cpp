#include "brute_force.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace rair::testing {

long long plain_round(double value, double bin) {
  const double q = value / bin;
  const double r = std::floor(std::fabs(q) + 0.5);
  return static_cast<long long>(q < 0 ? -r : r);
}

std::vector<std::vector<long long>> plain_symbols(const std::vector<PlainEntity>& entities, PlainVariant variant,
                                                  double bin, bool with_color) {
  std::vector<std::vector<long long>> out;
  const std::size_t n = entities.size();
  if (variant == PlainVariant::Direct || variant == PlainVariant::DirectPooled) {
    for (const auto& e : entities) {
      for (std::size_t a = 0; a < e.coords.size(); ++a) {
        const long long tag = variant == PlainVariant::Direct ? static_cast<long long>(a) : -1;
        out.push_back({tag, plain_round(e.coords[a], bin)});
      }
      if (with_color) {
        std::vector<long long> s{1000};
        for (int b : e.color_bits) s.push_back(b);
        out.push_back(s);
      }
    }
    return out;
  }
  auto colors = [&](std::vector<long long>& s, const PlainEntity& a, const PlainEntity& b) {
    if (!with_color) return;
    for (std::size_t k = 0; k < a.color_bits.size(); ++k) s.push_back(std::abs(a.color_bits[k] - b.color_bits[k]));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (variant != PlainVariant::RelPos && j < i) continue;
      std::vector<long long> s;
      const auto& a = entities[i];
      const auto& b = entities[j];
      if (variant == PlainVariant::Distance) {
        double sq = 0.0;
        for (std::size_t d = 0; d < a.coords.size(); ++d) sq += (a.coords[d] - b.coords[d]) * (a.coords[d] - b.coords[d]);
        s.push_back(plain_round(std::sqrt(sq), bin));
      } else {
        for (std::size_t d = 0; d < a.coords.size(); ++d) {
          const long long v = plain_round(a.coords[d] - b.coords[d], bin);
          s.push_back(variant == PlainVariant::AbsRelPos ? std::llabs(v) : v);
        }
      }
      colors(s, a, b);
      out.push_back(s);
    }
  }
  return out;
}

double plain_entropy(const std::vector<std::vector<long long>>& symbols) {
  std::map<std::vector<long long>, long long> counts;
  for (const auto& s : symbols) counts[s] += 1;
  const double total = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [s, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

double plain_rair(const std::vector<PlainEntity>& entities, PlainVariant variant, double bin, bool with_color) {
  return -plain_entropy(plain_symbols(entities, variant, bin, with_color));
}

PlainVariant plain_variant_for(const PhiSpec& spec) {
  switch (spec.variant) {
    case PhiVariant::Direct:
      return spec.axis_tagged ? PlainVariant::Direct : PlainVariant::DirectPooled;
    case PhiVariant::RelativePosition:
      return PlainVariant::RelPos;
    case PhiVariant::AbsRelativePosition:
      return PlainVariant::AbsRelPos;
    case PhiVariant::EuclideanDistance:
      return PlainVariant::Distance;
  }
  return PlainVariant::Direct;
}

std::vector<PlainEntity> plain_entities(const std::vector<EntityView>& views) {
  std::vector<PlainEntity> out;
  for (const auto& v : views) {
    PlainEntity e;
    for (std::size_t d = 0; d < v.dims; ++d) e.coords.push_back(v.position[d]);
    if (v.color) {
      for (std::size_t k = 0; k < v.color->length; ++k) e.color_bits.push_back(v.color->bits[k]);
    }
    out.push_back(e);
  }
  return out;
}

namespace {

void place_rec(int width, int height, int n, int start, std::vector<PlainEntity>& chosen, PlainVariant variant,
               double& best) {
  if (static_cast<int>(chosen.size()) == n) {
    best = std::max(best, plain_rair(chosen, variant, 1.0));
    return;
  }
  for (int c = start; c < width * height; ++c) {
    chosen.push_back({{static_cast<double>(c % width), static_cast<double>(c / width)}, {}});
    place_rec(width, height, n, c + 1, chosen, variant, best);
    chosen.pop_back();
  }
}

}  // namespace

double plain_grid_optimum(int width, int height, int n, PlainVariant variant) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<PlainEntity> chosen;
  place_rec(width, height, n, 0, chosen, variant, best);
  return best;
}

}  // namespace rair::testing
