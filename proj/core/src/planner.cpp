#include "rair/planner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "rair/error.hpp"

namespace rair {

std::string to_string(CostMode m) { return m == CostMode::Sum ? "sum" : "best"; }

CostMode cost_mode_from_string(const std::string& s) {
  if (s == "sum") return CostMode::Sum;
  if (s == "best") return CostMode::Best;
  throw ConfigError("unknown cost mode '" + s + "' (expected sum or best)");
}

void PlannerConfig::validate() const {
  if (samples_P < 1) throw ConfigError("planner.samples_P must be positive");
  if (horizon_H < 1) throw ConfigError("planner.horizon_H must be >= 1");
  if (elites_K < 1) throw ConfigError("planner.elites_K must be positive");
  if (elites_K > samples_P) throw ConfigError("planner.elites_K must not exceed planner.samples_P");
  if (cem_iterations < 1) throw ConfigError("planner.cem_iterations must be positive");
  if (!(noise_beta >= 0.0) || !std::isfinite(noise_beta)) throw ConfigError("planner.noise_beta must be >= 0");
  if (!(sigma_init > 0.0 && sigma_init <= 1.0)) throw ConfigError("planner.sigma_init must be in (0, 1]");
  if (!(momentum_alpha >= 0.0 && momentum_alpha <= 1.0)) throw ConfigError("planner.momentum_alpha must be in [0, 1]");
  if (!(elite_fraction_xi > 0.0 && elite_fraction_xi <= 1.0)) {
    throw ConfigError("planner.elite_fraction_xi must be in (0, 1]");
  }
}

int PlannerConfig::kept_elites() const {
  return std::min(elites_K, static_cast<int>(std::ceil(elite_fraction_xi * elites_K - 1e-12)));
}

nlohmann::json PlannerConfig::to_json() const {
  return {{"samples_P", samples_P},
          {"horizon_H", horizon_H},
          {"elites_K", elites_K},
          {"cem_iterations", cem_iterations},
          {"noise_beta", noise_beta},
          {"sigma_init", sigma_init},
          {"momentum_alpha", momentum_alpha},
          {"elite_fraction_xi", elite_fraction_xi},
          {"use_mean_actions", use_mean_actions},
          {"shift_elites", shift_elites},
          {"keep_elites", keep_elites},
          {"cost_mode", to_string(cost_mode)},
          {"seed", seed}};
}

nlohmann::json CemIterationStats::to_json() const {
  return {{"mpc_step", mpc_step},
          {"cem_iter", cem_iter},
          {"best_cost", best_cost},
          {"mean_cost", mean_cost},
          {"stddev_norm", stddev_norm}};
}

double aggregate_cost(std::span<const double> step_rewards, CostMode mode) {
  if (step_rewards.empty()) throw Error("empty reward sequence");
  if (mode == CostMode::Sum) {
    double c = 0.0;
    for (double r : step_rewards) c -= r;
    return c;
  }
  // Best: lowest cost over h >= 1; a one-step horizon falls back to h = 0
  const std::size_t first = step_rewards.size() > 1 ? 1 : 0;
  double best = -step_rewards[first];
  for (std::size_t h = first + 1; h < step_rewards.size(); ++h) best = std::min(best, -step_rewards[h]);
  return best;
}

std::vector<double> evaluate_plans(const DynamicsModel& model, const Configuration& state, std::span<const double> plans,
                                   int count, int horizon, const StepReward& reward, CostMode mode, int workers) {
  const std::size_t plan_len = static_cast<std::size_t>(horizon) * kActionDim;
  if (count < 0 || horizon < 1 || plans.size() != static_cast<std::size_t>(count) * plan_len) {
    throw Error("plans must be shaped count x horizon x 2");
  }
  const int M = model.members();
  const std::size_t dim = 2 * state.size();
  std::vector<double> costs(count, 0.0);
  std::vector<std::exception_ptr> failures(count);

  auto run_range = [&](int begin, int end) {
    std::vector<double> preds(static_cast<std::size_t>(horizon) * M * dim);
    std::vector<double> rewards(horizon);
    for (int p = begin; p < end; ++p) {
      try {
        model.rollout(state, plans.subspan(p * plan_len, plan_len), horizon, preds);
        for (int h = 0; h < horizon; ++h) {
          rewards[h] = reward(std::span<const double>(preds.data() + static_cast<std::size_t>(h) * M * dim, M * dim), M);
        }
        costs[p] = aggregate_cost(rewards, mode);
      } catch (...) {
        failures[p] = std::current_exception();
        return;
      }
    }
  };

  const int threads = std::clamp(workers, 1, std::max(1, count));
  if (threads == 1) {
    run_range(0, count);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = t * chunk;
      const int e = std::min(count, b + chunk);
      if (b < e) pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  for (int p = 0; p < count; ++p) {
    if (failures[p]) {
      try {
        std::rethrow_exception(failures[p]);
      } catch (const std::exception& e) {
        throw Error("plan " + std::to_string(p) + ": " + e.what());
      }
    }
  }
  return costs;
}

namespace {

double clip(double a) { return std::clamp(a, -1.0, 1.0); }

}  // namespace

std::vector<int> select_elites(std::span<const double> costs, int K) {
  std::vector<int> order(costs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto k = static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(K, 0)), 0, costs.size()));
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](int a, int b) { return costs[a] < costs[b] || (costs[a] == costs[b] && a < b); });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

void refit_distribution(std::span<const double> candidates, std::span<const int> elites, double alpha,
                        std::vector<double>& mean, std::vector<double>& stddev) {
  const std::size_t len = mean.size();
  if (elites.empty() || stddev.size() != len) throw Error("refit needs elites and matching mean/stddev");
  const auto K = static_cast<double>(elites.size());
  for (std::size_t j = 0; j < len; ++j) {
    double m = 0.0;
    for (int e : elites) m += candidates[e * len + j];
    m /= K;
    double v = 0.0;
    for (int e : elites) {
      const double d = candidates[e * len + j] - m;
      v += d * d;
    }
    const double s = std::sqrt(v / K);
    mean[j] = alpha * mean[j] + (1.0 - alpha) * m;
    stddev[j] = std::max(kStddevFloor, alpha * stddev[j] + (1.0 - alpha) * s);
  }
}

PlanResult icem_plan(const DynamicsModel& model, const Configuration& state, const PlannerConfig& config,
                     const StepReward& reward, PlannerCarry& carry, std::uint64_t mpc_step, int workers) {
  config.validate();
  const int H = config.horizon_H;
  const std::size_t len = static_cast<std::size_t>(H) * kActionDim;
  const int kept = config.kept_elites();

  std::vector<double> mean = carry.mean.size() == len ? carry.mean : std::vector<double>(len, 0.0);
  std::vector<double> stddev(len, config.sigma_init);

  // elites reused in the next iteration, sorted by cost
  std::vector<double> reuse;
  int reuse_count = 0;
  if (config.shift_elites && carry.elite_count > 0 && carry.elites.size() == carry.elite_count * len) {
    reuse = carry.elites;
    reuse_count = carry.elite_count;
  }

  PlanResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> elite_plans;
  std::vector<double> candidates;

  for (int it = 0; it < config.cem_iterations; ++it) {
    const bool add_mean = config.use_mean_actions && it == config.cem_iterations - 1;
    const int extra = reuse_count + (add_mean ? 1 : 0);
    const int fresh = std::max(0, config.samples_P - extra);
    const int total = fresh + extra;

    candidates.assign(static_cast<std::size_t>(total) * len, 0.0);
    for (int c = 0; c < fresh; ++c) {
      Rng rng(derive_seed(config.seed, "noise",
                          {mpc_step, static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(c)}));
      const auto noise = sample_colored_noise(config.noise_beta, H, kActionDim, 1, rng);
      double* dst = candidates.data() + c * len;
      for (std::size_t j = 0; j < len; ++j) dst[j] = clip(mean[j] + stddev[j] * noise[j]);
    }
    if (reuse_count > 0) {
      std::copy(reuse.begin(), reuse.end(), candidates.begin() + static_cast<std::ptrdiff_t>(fresh * len));
    }
    if (add_mean) {
      double* dst = candidates.data() + static_cast<std::size_t>(total - 1) * len;
      for (std::size_t j = 0; j < len; ++j) dst[j] = clip(mean[j]);
    }

    const auto costs = evaluate_plans(model, state, candidates, total, H, reward, config.cost_mode, workers);

    const std::vector<int> order = select_elites(costs, total);
    const int K = std::min(config.elites_K, total);

    if (costs[order[0]] < result.best_cost) {
      result.best_cost = costs[order[0]];
      result.best_plan.assign(candidates.begin() + static_cast<std::ptrdiff_t>(order[0] * len),
                              candidates.begin() + static_cast<std::ptrdiff_t>((order[0] + 1) * len));
    }
    refit_distribution(candidates, std::span<const int>(order.data(), K), config.momentum_alpha, mean, stddev);

    elite_plans.assign(static_cast<std::size_t>(kept) * len, 0.0);
    for (int e = 0; e < std::min(kept, total); ++e) {
      std::copy_n(candidates.begin() + static_cast<std::ptrdiff_t>(order[e] * len), len,
                  elite_plans.begin() + static_cast<std::ptrdiff_t>(e * len));
    }
    if (config.keep_elites) {
      reuse = elite_plans;
      reuse_count = std::min(kept, total);
      reuse.resize(static_cast<std::size_t>(reuse_count) * len);
    } else {
      reuse.clear();
      reuse_count = 0;
    }

    double mean_cost = 0.0;
    for (double c : costs) mean_cost += c;
    double norm = 0.0;
    for (double s : stddev) norm += s * s;
    result.diagnostics.push_back({mpc_step, it, costs[order[0]], mean_cost / total, std::sqrt(norm)});
  }

  result.first_action = {result.best_plan[0], result.best_plan[1]};
  result.min_stddev = *std::min_element(stddev.begin(), stddev.end());

  // shift for the next MPC step
  carry.mean.assign(len, 0.0);
  std::copy(mean.begin() + kActionDim, mean.end(), carry.mean.begin());
  carry.elites.clear();
  carry.elite_count = 0;
  if (config.shift_elites) {
    const int n = static_cast<int>(elite_plans.size() / len);
    carry.elites.assign(static_cast<std::size_t>(n) * len, 0.0);
    for (int e = 0; e < n; ++e) {
      double* dst = carry.elites.data() + e * len;
      std::copy(elite_plans.begin() + static_cast<std::ptrdiff_t>(e * len + kActionDim),
                elite_plans.begin() + static_cast<std::ptrdiff_t>((e + 1) * len), dst);
      Rng rng(derive_seed(config.seed, "shift", {mpc_step, static_cast<std::uint64_t>(e)}));
      for (int d = 0; d < kActionDim; ++d) {
        const std::size_t j = len - kActionDim + d;
        dst[j] = clip(mean[j] + stddev[j] * standard_normal(rng));
      }
    }
    carry.elite_count = n;
  }
  return result;
}

StepReward make_step_reward(const Objective& objective, const Configuration& like) {
  return [objective, like](std::span<const double> predictions, int members) {
    const std::size_t dim = predictions.size() / members;
    double r = 0.0;
    if (objective.rair_weight != 0.0) {
      thread_local std::vector<double> mean;
      thread_local std::vector<EntityView> views;
      if (members == 1) {
        mean.assign(predictions.begin(), predictions.end());
      } else {
        mean.assign(dim, 0.0);
        for (int m = 0; m < members; ++m) {
          for (std::size_t d = 0; d < dim; ++d) mean[d] += predictions[m * dim + d];
        }
        for (double& v : mean) v /= members;
      }
      views_from_positions(mean, like, views);
      r += objective.rair_weight * rair_reward(views, objective.phi);
    }
    if (objective.disagreement_weight != 0.0 && members >= 2) {
      r += objective.disagreement_weight * disagreement(predictions, members);
    }
    return r;
  };
}

nlohmann::json StepRecord::to_json() const {
  nlohmann::json positions = nlohmann::json::array();
  for (const auto& c : state.positions) positions.push_back({c.col, c.row});
  return {{"step", step},
          {"positions", positions},
          {"cursor", {{"entity", state.cursor.entity}, {"remaining", state.cursor.remaining}}},
          {"action", {action.x, action.y}},
          {"move", {move_dx, move_dy}},
          {"moved", moved},
          {"actuated", actuated},
          {"rair", rair},
          {"disagreement", disagreement},
          {"intrinsic", intrinsic},
          {"planned_cost", planned_cost}};
}

RolloutRecord mpc_rollout(const DynamicsModel& planning_model, const GridWorld& env, const Configuration& start,
                          const PlannerConfig& config, const Objective& objective, int episode_length,
                          const MpcOptions& options) {
  if (episode_length < 1) throw Error("episode_length must be >= 1");
  config.validate();
  env.check_state(start);

  const StepReward plan_reward = options.plan_reward ? options.plan_reward : make_step_reward(objective, start);
  RolloutRecord record;
  record.initial = start;
  std::vector<EntityView> views;
  entity_views(start, views);
  record.initial_rair = rair_reward(views, objective.phi);

  PlannerCarry carry;
  Configuration state = start;
  for (int t = 0; t < episode_length; ++t) {
    const auto step = static_cast<std::uint64_t>(t);
    PlanResult plan = icem_plan(planning_model, state, config, plan_reward, carry, step, options.workers);

    StepRecord rec;
    rec.step = step;
    rec.state = state;
    rec.action = plan.first_action;
    rec.actuated = state.cursor.entity;
    rec.planned_cost = plan.best_cost;
    if (planning_model.members() >= 2) {
      rec.disagreement = disagreement(planning_model.predict(state, plan.first_action), planning_model.members());
    }
    const Cell before = state.positions[state.cursor.entity];
    rec.moved = env.step_in_place(state, plan.first_action);
    const Cell after = state.positions[rec.actuated];
    rec.move_dx = after.col - before.col;
    rec.move_dy = after.row - before.row;
    entity_views(state, views);
    rec.rair = rair_reward(views, objective.phi);
    rec.intrinsic = objective.rair_weight * rec.rair + objective.disagreement_weight * rec.disagreement;

    record.diagnostics.insert(record.diagnostics.end(), plan.diagnostics.begin(), plan.diagnostics.end());
    if (options.on_step) options.on_step(rec, state);
    record.steps.push_back(std::move(rec));
  }
  record.final_state = state;
  return record;
}

}  // namespace rair
