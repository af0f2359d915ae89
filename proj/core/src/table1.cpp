#include "rair/table1.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "rair/error.hpp"
#include "rair/rng.hpp"

namespace rair {

namespace {

using nlohmann::json;

constexpr int kMaxRejections = 10000;

json positions_json(std::span<const EntityView> entities) {
  json arr = json::array();
  for (const auto& e : entities) arr.push_back({e.position[0], e.position[1]});
  return arr;
}

bool all_unique(std::span<const EntityView> entities, const PhiSpec& spec) {
  const SymbolHistogram h = build_multiset(entities, spec);
  return h.unique() == h.total();
}

std::vector<EntityView> random_integer_probe(Rng& rng, int count, int extent) {
  std::set<std::pair<int, int>> used;
  std::vector<EntityView> out;
  while (static_cast<int>(out.size()) < count) {
    const int x = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(extent + 1)));
    const int y = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(extent + 1)));
    if (used.insert({x, y}).second) out.push_back(EntityView::at(x, y));
  }
  return out;
}

std::vector<EntityView> random_continuous(Rng& rng, int count, double extent) {
  std::vector<EntityView> out;
  for (int i = 0; i < count; ++i) out.push_back(EntityView::at(extent * uniform01(rng), extent * uniform01(rng)));
  return out;
}

PhiSpec pooled_direct(double bin) { return PhiSpec::direct(bin, false); }

std::vector<SpecFactory> all_factories() {
  std::vector<SpecFactory> f;
  for (int c = 0; c < kTableColumns; ++c) f.push_back([c](double b) { return table_column_spec(c, b); });
  f.push_back(pooled_direct);
  return f;
}

// First half for a favoring trial: generic points whose own symbols are
// already unique under every phi, so repeats in the base can only come from
// the operation.
std::vector<EntityView> generic_half(std::uint64_t seed, int count, double bin) {
  Rng rng(seed);
  const auto factories = all_factories();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    auto half = random_continuous(rng, count, 10.0);
    bool ok = true;
    for (const auto& f : factories) {
      if (!all_unique(half, f(bin))) {
        ok = false;
        break;
      }
    }
    if (ok) return half;
  }
  throw Error("could not draw a generic configuration");
}

std::vector<EntityView> scrambled_control(std::uint64_t seed, std::span<const EntityView> half, const PhiSpec& spec) {
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    std::vector<EntityView> all(half.begin(), half.end());
    auto extra = random_continuous(rng, static_cast<int>(half.size()), 10.0);
    all.insert(all.end(), extra.begin(), extra.end());
    if (all_unique(all, spec)) return all;
  }
  throw Error("could not draw a scrambled control with unique symbols");
}

}  // namespace

std::vector<TableRow> symmetry_table_rows() {
  const Vec2 generic_center{5.3, 4.1};
  const Vec2 generic_dir{std::cos(37.0 * std::numbers::pi / 180.0), std::sin(37.0 * std::numbers::pi / 180.0)};
  return {
      {"translation", SymmetryOp::translate({0.37, 0.61}), false},
      {"translation a.a.", SymmetryOp::translate({3.0, 0.0}), true},
      {"rotation", SymmetryOp::rotate_degrees(37.0, generic_center), false},
      {"rotation 90", SymmetryOp::rotate_degrees(90.0, {5.0, 4.0}), true},
      {"reflection", SymmetryOp::reflect(generic_center, generic_dir), false},
      {"reflection a.a.", SymmetryOp::reflect({0.0, 4.0}, {1.0, 0.0}), true},
      {"glide reflection", SymmetryOp::glide(generic_center, generic_dir, 2.9), false},
      {"glide reflection a.a.", SymmetryOp::glide({0.0, 4.0}, {1.0, 0.0}, 3.0), true},
  };
}

PhiSpec table_column_spec(int column, double bin_size) {
  switch (column) {
    case 0: return PhiSpec::direct(bin_size, true);
    case 1: return PhiSpec::relational(PhiVariant::RelativePosition, bin_size);
    case 2: return PhiSpec::relational(PhiVariant::AbsRelativePosition, bin_size);
    case 3: return PhiSpec::relational(PhiVariant::EuclideanDistance, bin_size);
    default: throw Error("table column out of range");
  }
}

std::string table_column_name(int column) {
  static const char* names[] = {"direct", "rel_pos", "abs_rel_pos", "distance"};
  if (column < 0 || column >= kTableColumns) throw Error("table column out of range");
  return names[column];
}

const VerdictMatrix& reference_invariance() {
  static const VerdictMatrix m{{
      {false, true, true, true},
      {true, true, true, true},
      {false, true, false, true},
      {true, true, true, true},
      {false, true, false, true},
      {true, true, true, true},
      {false, true, false, true},
      {true, true, true, true},
  }};
  return m;
}

const VerdictMatrix& reference_favoring() {
  static const VerdictMatrix m{{
      {false, true, true, true},
      {true, true, true, true},
      {false, false, false, true},
      {false, false, true, true},
      {false, false, false, true},
      {true, false, true, true},
      {false, false, false, true},
      {true, false, true, true},
  }};
  return m;
}

std::vector<NamedConfiguration> invariance_witnesses() {
  return {
      // axis-shared coordinates; any generic rotation or reflection breaks them
      {"l_shape", {EntityView::at(0, 0), EntityView::at(0, 2), EntityView::at(2, 0)}},
      // two relation vectors equal only in absolute value
      {"v_shape", {EntityView::at(0, 0), EntityView::at(1, 1), EntityView::at(2, 0)}},
      // x-coordinates 0.6 bins apart at bin 0.1; a 3.7-bin shift merges them
      {"jitter_pair", {EntityView::at(0.0, 0.0), EntityView::at(0.06, 1.0), EntityView::at(2.0, 2.04)}},
  };
}

std::vector<EntityView> favoring_base(const SymmetryOp& op, std::span<const EntityView> half, bool twice) {
  std::vector<EntityView> base(half.begin(), half.end());
  const auto copy = twice ? rair::apply_twice(op, half) : rair::apply(op, half);
  base.insert(base.end(), copy.begin(), copy.end());
  return base;
}

CellResult evaluate_cell(int row_index, const TableRow& row, const SpecFactory& spec, const TableOptions& options,
                         bool twice) {
  CellResult cell;

  // Invariance: pinned witnesses first, then random integer probes.
  const PhiSpec inv_spec = spec(row.axis_aligned ? options.aligned_bin : options.generic_bin);
  std::vector<NamedConfiguration> probes = invariance_witnesses();
  for (int i = 0; i < options.random_probes; ++i) {
    Rng rng(derive_seed(options.seed, "probe", {static_cast<std::uint64_t>(row_index), static_cast<std::uint64_t>(i)}));
    probes.push_back({"random_" + std::to_string(i), random_integer_probe(rng, options.probe_entities, 12)});
  }
  cell.invariant = true;
  cell.invariance_witness = {{"probes", probes.size()}, {"bin_size", inv_spec.bin_size}};
  for (const auto& probe : probes) {
    const double before = rair_reward(probe.entities, inv_spec);
    const auto moved = twice ? rair::apply_twice(row.op, probe.entities) : rair::apply(row.op, probe.entities);
    const double after = rair_reward(moved, inv_spec);
    if (std::abs(before - after) > kInvarianceTolerance) {
      cell.invariant = false;
      cell.invariance_witness = {{"probe", probe.name},
                                 {"bin_size", inv_spec.bin_size},
                                 {"positions", positions_json(probe.entities)},
                                 {"transformed", positions_json(moved)},
                                 {"reward_before", before},
                                 {"reward_after", after}};
      break;
    }
  }

  // Favoring: A ∪ op(A) against A ∪ (generic points), continuous positions.
  const PhiSpec fav_spec = spec(options.favor_bin);
  int favored = 0;
  json trials = json::array();
  for (int t = 0; t < options.favor_trials; ++t) {
    const auto half = generic_half(
        derive_seed(options.seed, "favor", {static_cast<std::uint64_t>(row_index), static_cast<std::uint64_t>(t)}),
        options.favor_half, options.favor_bin);
    const auto base = favoring_base(row.op, half, twice);
    const auto scrambled = scrambled_control(
        derive_seed(options.seed, "scramble", {static_cast<std::uint64_t>(row_index), static_cast<std::uint64_t>(t)}),
        half, fav_spec);
    const double r_base = rair_reward(base, fav_spec);
    const double r_scr = rair_reward(scrambled, fav_spec);
    const bool f = check_favoring(fav_spec, row.op, base, scrambled);
    favored += f ? 1 : 0;
    trials.push_back({{"reward_base", r_base}, {"reward_scrambled", r_scr}, {"favored", f}});
  }
  cell.favored = 2 * favored > options.favor_trials;
  cell.favoring_consistent = favored == 0 || favored == options.favor_trials;
  cell.favoring_witness = {{"bin_size", fav_spec.bin_size}, {"trials", trials}};
  return cell;
}

TableReport analyze_symmetry_table(const TableOptions& options) {
  TableReport report;
  const auto rows = symmetry_table_rows();
  for (const auto& r : rows) report.rows.push_back(r.name);
  for (int c = 0; c < kTableColumns; ++c) report.columns.push_back(table_column_name(c));

  for (int r = 0; r < kTableRows; ++r) {
    for (int c = 0; c < kTableColumns; ++c) {
      report.cells[r][c] = evaluate_cell(r, rows[r], [c](double b) { return table_column_spec(c, b); }, options);
    }
    report.pooled_direct[r] = evaluate_cell(r, rows[r], pooled_direct, options);
  }
  const int glide_rows[2] = {6, 7};
  for (int g = 0; g < 2; ++g) {
    for (int c = 0; c < kTableColumns; ++c) {
      report.glide_twice[g][c] = evaluate_cell(glide_rows[g], rows[glide_rows[g]],
                                               [c](double b) { return table_column_spec(c, b); }, options, true);
    }
  }
  return report;
}

int TableReport::invariance_mismatches() const {
  int n = 0;
  for (int r = 0; r < kTableRows; ++r)
    for (int c = 0; c < kTableColumns; ++c) n += cells[r][c].invariant != reference_invariance()[r][c];
  return n;
}

int TableReport::favoring_mismatches() const {
  int n = 0;
  for (int r = 0; r < kTableRows; ++r)
    for (int c = 0; c < kTableColumns; ++c) n += cells[r][c].favored != reference_favoring()[r][c];
  return n;
}

json TableReport::to_json() const {
  json j;
  j["columns"] = columns;
  j["rows"] = rows;
  json matrix = json::array();
  for (int r = 0; r < kTableRows; ++r) {
    for (int c = 0; c < kTableColumns; ++c) {
      const CellResult& cell = cells[r][c];
      matrix.push_back({{"row", rows[r]},
                        {"phi", columns[c]},
                        {"invariant", cell.invariant},
                        {"favored", cell.favored},
                        {"reference_invariant", reference_invariance()[r][c]},
                        {"reference_favored", reference_favoring()[r][c]},
                        {"invariance_matches", cell.invariant == reference_invariance()[r][c]},
                        {"favoring_matches", cell.favored == reference_favoring()[r][c]},
                        {"favoring_consistent", cell.favoring_consistent},
                        {"invariance_witness", cell.invariance_witness},
                        {"favoring_witness", cell.favoring_witness}});
    }
  }
  j["matrix"] = matrix;

  json glide = json::array();
  const int glide_rows[2] = {6, 7};
  for (int g = 0; g < 2; ++g) {
    for (int c = 0; c < kTableColumns; ++c) {
      glide.push_back({{"row", rows[glide_rows[g]] + " x2"},
                       {"phi", columns[c]},
                       {"favored", glide_twice[g][c].favored},
                       {"favoring_witness", glide_twice[g][c].favoring_witness}});
    }
  }
  j["glide_composed_twice"] = glide;

  json pooled = json::array();
  for (int r = 0; r < kTableRows; ++r) {
    const CellResult& cell = pooled_direct[r];
    const bool inv_div = cell.invariant != reference_invariance()[r][0];
    const bool fav_div = cell.favored != reference_favoring()[r][0];
    pooled.push_back({{"row", rows[r]},
                      {"invariant", cell.invariant},
                      {"favored", cell.favored},
                      {"invariance_diverges", inv_div},
                      {"favoring_diverges", fav_div},
                      {"invariance_witness", cell.invariance_witness}});
  }
  j["pooled_direct"] = pooled;
  j["summary"] = {{"invariance_verdicts", kTableRows * kTableColumns},
                  {"favoring_verdicts", kTableRows * kTableColumns},
                  {"invariance_mismatches", invariance_mismatches()},
                  {"favoring_mismatches", favoring_mismatches()}};
  return j;
}

}  // namespace rair
