#pragma once

// iCEM trajectory optimization with colored-noise sampling, elite reuse and
// sum/best cost aggregation, run in a receding-horizon (MPC) loop.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/dynamics.hpp"
#include "rair/reward.hpp"
#include "rair/rng.hpp"

namespace rair {

inline constexpr int kActionDim = 2;
inline constexpr double kStddevFloor = 1e-3;

enum class CostMode { Sum, Best };
std::string to_string(CostMode m);
CostMode cost_mode_from_string(const std::string& s);

struct PlannerConfig {
  int samples_P = 64;
  int horizon_H = 30;
  int elites_K = 10;
  int cem_iterations = 3;
  double noise_beta = 3.5;
  double sigma_init = 0.8;
  double momentum_alpha = 0.1;
  double elite_fraction_xi = 0.3;
  bool use_mean_actions = true;
  bool shift_elites = true;
  bool keep_elites = true;
  CostMode cost_mode = CostMode::Best;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  int kept_elites() const;  // ceil(xi * K)
  nlohmann::json to_json() const;
};

// count x horizon x dim, each (sequence, dim) track standardized to zero mean
// and unit variance with power spectrum ~ f^-beta. horizon = 1 yields white
// Gaussian draws.
std::vector<double> sample_colored_noise(double beta, int horizon, int dim, int count, Rng& rng);

// Reward for one predicted step: `predictions` holds M x 2N member predictions.
using StepReward = std::function<double(std::span<const double> predictions, int members)>;

// Per-plan cost from per-step rewards (cost = -reward).
double aggregate_cost(std::span<const double> step_rewards, CostMode mode);

// plans: count x horizon x 2. Fans out over `workers` threads; the result does
// not depend on the worker count.
std::vector<double> evaluate_plans(const DynamicsModel& model, const Configuration& state, std::span<const double> plans,
                                   int count, int horizon, const StepReward& reward, CostMode mode, int workers = 1);

// Indices of the K lowest costs, ties broken by lower index.
std::vector<int> select_elites(std::span<const double> costs, int K);

// mean/stddev <- alpha * old + (1 - alpha) * (elite mean / population stddev),
// stddev floored at kStddevFloor. candidates: count x len.
void refit_distribution(std::span<const double> candidates, std::span<const int> elites, double alpha,
                        std::vector<double>& mean, std::vector<double>& stddev);

struct CemIterationStats {
  std::uint64_t mpc_step = 0;
  int cem_iter = 0;
  double best_cost = 0.0;
  double mean_cost = 0.0;
  double stddev_norm = 0.0;
  nlohmann::json to_json() const;
};

// State carried between MPC steps: shifted mean and shifted elites.
struct PlannerCarry {
  std::vector<double> mean;    // horizon x 2, empty before the first step
  std::vector<double> elites;  // k x horizon x 2
  int elite_count = 0;
};

struct PlanResult {
  GridAction first_action;
  std::vector<double> best_plan;  // horizon x 2
  double best_cost = 0.0;
  std::vector<CemIterationStats> diagnostics;
  double min_stddev = 0.0;
};

PlanResult icem_plan(const DynamicsModel& model, const Configuration& state, const PlannerConfig& config,
                     const StepReward& reward, PlannerCarry& carry, std::uint64_t mpc_step, int workers = 1);

// Intrinsic objective: rair_weight * RaIR(ensemble mean) + disagreement_weight * disagreement.
struct Objective {
  PhiSpec phi;
  double rair_weight = 1.0;
  double disagreement_weight = 0.0;
};

// RaIR of the ensemble-mean prediction plus weighted disagreement; colors and
// frozen flags come from `like`.
StepReward make_step_reward(const Objective& objective, const Configuration& like);

struct StepRecord {
  std::uint64_t step = 0;
  Configuration state;  // before the transition
  GridAction action;
  int move_dx = 0;
  int move_dy = 0;
  bool moved = false;
  int actuated = 0;
  double rair = 0.0;          // RaIR of the real next state
  double disagreement = 0.0;  // planning model at the executed action
  double intrinsic = 0.0;
  double planned_cost = 0.0;
  nlohmann::json to_json() const;
};

struct RolloutRecord {
  Configuration initial;
  Configuration final_state;
  double initial_rair = 0.0;
  std::vector<StepRecord> steps;
  std::vector<CemIterationStats> diagnostics;

  double final_rair() const { return steps.empty() ? initial_rair : steps.back().rair; }
};

struct MpcOptions {
  int workers = 1;
  StepReward plan_reward;  // overrides the objective-derived planning reward when set
  std::function<void(const StepRecord&, const Configuration& next)> on_step;
};

RolloutRecord mpc_rollout(const DynamicsModel& planning_model, const GridWorld& env, const Configuration& start,
                          const PlannerConfig& config, const Objective& objective, int episode_length,
                          const MpcOptions& options = {});

}  // namespace rair
