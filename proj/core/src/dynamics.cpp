#include "rair/dynamics.hpp"

#include "rair/error.hpp"

namespace rair {

std::vector<double> DynamicsModel::predict(const Configuration& state, GridAction action) const {
  std::vector<double> out(static_cast<std::size_t>(members()) * 2 * state.size());
  const double plan[2] = {action.x, action.y};
  rollout(state, plan, 1, out);
  return out;
}

void GroundTruthModel::rollout(const Configuration& start, std::span<const double> plan, int horizon,
                               std::span<double> out) const {
  const std::size_t dim = 2 * start.size();
  if (plan.size() < static_cast<std::size_t>(horizon) * 2 || out.size() < static_cast<std::size_t>(horizon) * dim) {
    throw Error("rollout buffers too small");
  }
  Configuration s = start;
  for (int h = 0; h < horizon; ++h) {
    world_.step_in_place(s, {plan[2 * h], plan[2 * h + 1]});
    double* dst = out.data() + static_cast<std::size_t>(h) * dim;
    for (std::size_t i = 0; i < s.size(); ++i) {
      dst[2 * i] = s.positions[i].col;
      dst[2 * i + 1] = s.positions[i].row;
    }
  }
}

Configuration gt_predict(const GridWorld& world, const Configuration& state, GridAction action) {
  return world.step(state, action);
}

std::vector<double> flatten_positions(const Configuration& state) {
  std::vector<double> out(2 * state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    out[2 * i] = state.positions[i].col;
    out[2 * i + 1] = state.positions[i].row;
  }
  return out;
}

double disagreement(std::span<const double> predictions, int members) {
  if (members < 2) throw Error("disagreement needs at least 2 ensemble members");
  if (predictions.empty() || predictions.size() % static_cast<std::size_t>(members) != 0) {
    throw Error("prediction buffer is not M equal-length vectors");
  }
  const std::size_t dim = predictions.size() / members;
  double trace = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    // deviations from member 0 keep identical members at exactly zero
    const double ref = predictions[d];
    double mean = 0.0;
    for (int m = 0; m < members; ++m) mean += predictions[m * dim + d] - ref;
    mean /= members;
    double var = 0.0;
    for (int m = 0; m < members; ++m) {
      const double e = predictions[m * dim + d] - ref - mean;
      var += e * e;
    }
    trace += var / members;
  }
  return trace;
}

void views_from_positions(std::span<const double> positions, const Configuration& like, std::vector<EntityView>& out) {
  const std::size_t n = like.size();
  if (positions.size() != 2 * n) throw Error("position vector length differs from entity count");
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    EntityView v;
    v.position = {positions[2 * i], positions[2 * i + 1], 0.0};
    v.dims = 2;
    if (!like.colors.empty()) v.color = ColorCode::encode(like.colors[i], like.num_colors);
    v.frozen = like.frozen[i];
    out[i] = v;
  }
}

}  // namespace rair
