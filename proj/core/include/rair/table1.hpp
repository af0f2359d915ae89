#pragma once

// Symmetry-property matrix: for each (phi, symmetry operation) pair, whether
// the regularity reward is invariant under the operation and whether patterns
// containing op-related copies score higher than a scrambled control.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/reward.hpp"
#include "rair/symmetry.hpp"

namespace rair {

inline constexpr int kTableRows = 8;
inline constexpr int kTableColumns = 4;

struct TableRow {
  std::string name;
  SymmetryOp op;
  bool axis_aligned = false;
};

// Rows: translation, translation a.a., rotation, rotation 90, reflection,
// reflection a.a., glide reflection, glide reflection a.a.
std::vector<TableRow> symmetry_table_rows();

// Columns: direct (axis-tagged), relative position, |relative position|, distance.
PhiSpec table_column_spec(int column, double bin_size);
std::string table_column_name(int column);

// Published reference verdicts, indexed [row][column].
using VerdictMatrix = std::array<std::array<bool, kTableColumns>, kTableRows>;
const VerdictMatrix& reference_invariance();
const VerdictMatrix& reference_favoring();

// Pinned configurations that certify non-invariance; evaluated for every cell.
struct NamedConfiguration {
  std::string name;
  std::vector<EntityView> entities;
};
std::vector<NamedConfiguration> invariance_witnesses();

struct CellResult {
  bool invariant = false;
  bool favored = false;
  bool favoring_consistent = true;  // all trials agreed
  nlohmann::json invariance_witness;
  nlohmann::json favoring_witness;
};

struct TableOptions {
  std::uint64_t seed = 7;
  int random_probes = 24;
  int probe_entities = 6;
  int favor_trials = 5;
  int favor_half = 4;
  double aligned_bin = 1.0;   // bin-exact rows
  double generic_bin = 0.1;   // generic-parameter rows, integer probes
  double favor_bin = 1e-4;    // continuous favoring constructions
};

struct TableReport {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::array<std::array<CellResult, kTableColumns>, kTableRows> cells;
  // Glide composed twice, per glide row (generic, a.a.) and column.
  std::array<std::array<CellResult, kTableColumns>, 2> glide_twice;
  // Direct phi with all axes pooled into one namespace.
  std::array<CellResult, kTableRows> pooled_direct;

  int invariance_mismatches() const;
  int favoring_mismatches() const;
  nlohmann::json to_json() const;
};

// Builds the symmetric construction A ∪ op(A) (or A ∪ op(op(A)) when twice).
std::vector<EntityView> favoring_base(const SymmetryOp& op, std::span<const EntityView> half, bool twice = false);

// Phi for a given bin size; lets one cell be evaluated at the bin each check needs.
using SpecFactory = std::function<PhiSpec(double bin_size)>;

// Evaluates one cell; exposed for the unit tests.
CellResult evaluate_cell(int row_index, const TableRow& row, const SpecFactory& spec, const TableOptions& options,
                         bool twice = false);

TableReport analyze_symmetry_table(const TableOptions& options = {});

}  // namespace rair
