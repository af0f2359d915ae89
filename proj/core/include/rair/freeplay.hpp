#pragma once

// Free play: alternate intrinsically rewarded MPC data collection with
// ensemble training; plus re-creation of frozen template arrangements.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/ensemble.hpp"
#include "rair/gridworld.hpp"
#include "rair/planner.hpp"

namespace rair {

enum class IntrinsicComponents { RaIROnly, DisagreementOnly, Combined };
std::string to_string(IntrinsicComponents c);
IntrinsicComponents intrinsic_components_from_string(const std::string& s);

struct IntrinsicSpec {
  PhiSpec phi;
  double lambda = 0.1;
  IntrinsicComponents components = IntrinsicComponents::Combined;

  void validate() const;  // throws ConfigError
  Objective objective() const;
  nlohmann::json to_json() const;
};

// r_RaIR(ensemble mean) + lambda * disagreement over M member predictions
// (M x 2N); `like` supplies colors and frozen flags.
double intrinsic_reward(std::span<const double> predictions, int members, const IntrinsicSpec& spec,
                        const Configuration& like);

struct FreePlayConfig {
  int iterations = 30;
  int rollouts_per_iter = 10;
  int episode_length = 50;
  int checkpoint_every = 10;
  PlannerConfig planner;
  EnsembleConfig ensemble;
  GridConfig env;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct IterationMetrics {
  int iteration = 0;  // 1-based
  double best_rair = 0.0;
  double mean_rair = 0.0;
  double mean_disagreement = 0.0;
  double moved_fraction = 0.0;
  double adjacent_fraction = 0.0;
  std::vector<double> member_loss;
  std::size_t buffer_size = 0;

  nlohmann::json to_json() const;
};

// Pure function of the collected rollouts.
IterationMetrics compute_metrics(int iteration, const std::vector<RolloutRecord>& rollouts);

// True if two entities are within Chebyshev distance 1.
bool has_adjacent_pair(const Configuration& state);

std::string metrics_csv_header();
std::string metrics_csv_row(const IterationMetrics& m);

struct FreePlayCallbacks {
  std::function<void(int iteration, int rollout, const RolloutRecord&)> on_rollout;
  std::function<void(const IterationMetrics&)> on_iteration;
  std::optional<std::filesystem::path> checkpoint_dir;
};

struct FreePlayResult {
  Ensemble ensemble;
  ReplayBuffer buffer;
  std::vector<IterationMetrics> metrics;
  std::vector<std::filesystem::path> checkpoints;
};

FreePlayResult run_free_play(const FreePlayConfig& config, const IntrinsicSpec& spec, int workers = 1,
                             const FreePlayCallbacks& callbacks = {});

// ---- re-creation ----

struct RecreationConfig {
  GridConfig env;  // num_entities and frozen_mask are derived from the template
  std::vector<Cell> template_cells;
  int movable = 3;
  // Movable entities spawn uniformly inside this rectangle [col0, col1) x [row0, row1).
  int spawn_col0 = 0;
  int spawn_row0 = 0;
  int spawn_col1 = 0;
  int spawn_row1 = 0;
  std::vector<Cell> movable_start;  // explicit starts override random spawning
  int rollouts = 15;
  int episode_length = 100;
  double bin_size = 1.0;
  PlannerConfig planner;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  GridConfig resolved_env() const;
};

struct RecreationRollout {
  int rollout = 0;
  bool success = false;
  bool success_at_start = false;
  double initial_rair = 0.0;
  double final_rair = 0.0;
  Configuration final_state;
};

struct RecreationReport {
  std::vector<std::int32_t> dominant_relation;  // |d col|, |d row|
  std::uint64_t template_multiplicity = 0;
  std::vector<RecreationRollout> rollouts;
  double fraction = 0.0;
  double fraction_at_start = 0.0;

  nlohmann::json to_json() const;
};

// Dominant |relative position| symbol among template pairs and its multiplicity.
std::pair<Symbol, std::uint64_t> template_dominant_relation(const std::vector<Cell>& cells);

// Whether the movable entities' pairwise relations contain `relation` at least
// `required` times.
bool recreation_satisfied(const Configuration& state, const Symbol& relation, std::uint64_t required);

RecreationReport run_recreation(const RecreationConfig& config, int workers = 1,
                                const std::function<void(int, const RolloutRecord&)>& on_rollout = {});

}  // namespace rair
