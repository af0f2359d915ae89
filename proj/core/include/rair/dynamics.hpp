#pragma once

// Dynamics-model abstraction used by the planner: exact simulator or learned
// ensemble. Predictions are flattened entity positions (col0,row0,col1,...).

#include <span>
#include <string>
#include <vector>

#include "rair/gridworld.hpp"

namespace rair {

class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;
  virtual int members() const = 0;
  virtual std::string name() const = 0;

  // Rolls `plan` (horizon x 2, row-major) forward from `start`. For step h and
  // member m, the predicted next positions go to out[(h*M + m)*2N, +2N).
  // Must be safe to call concurrently.
  virtual void rollout(const Configuration& start, std::span<const double> plan, int horizon,
                       std::span<double> out) const = 0;

  // Member predictions for a single transition, M x 2N.
  std::vector<double> predict(const Configuration& state, GridAction action) const;
};

class GroundTruthModel final : public DynamicsModel {
 public:
  explicit GroundTruthModel(GridWorld world) : world_(std::move(world)) {}
  int members() const override { return 1; }
  std::string name() const override { return "ground_truth"; }
  void rollout(const Configuration& start, std::span<const double> plan, int horizon,
               std::span<double> out) const override;
  const GridWorld& world() const { return world_; }

 private:
  GridWorld world_;
};

// Exact next state; identical to GridWorld::step.
Configuration gt_predict(const GridWorld& world, const Configuration& state, GridAction action);

std::vector<double> flatten_positions(const Configuration& state);

// Trace of the population covariance of M prediction vectors of length dim.
double disagreement(std::span<const double> predictions, int members);

// Entity views for a flattened position vector, carrying colors and frozen
// flags from `like`.
void views_from_positions(std::span<const double> positions, const Configuration& like, std::vector<EntityView>& out);

}  // namespace rair
