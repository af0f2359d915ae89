#include "rair/freeplay.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rair/error.hpp"

namespace rair {

std::string to_string(IntrinsicComponents c) {
  switch (c) {
    case IntrinsicComponents::RaIROnly: return "rair_only";
    case IntrinsicComponents::DisagreementOnly: return "disagreement_only";
    case IntrinsicComponents::Combined: return "combined";
  }
  return "combined";
}

IntrinsicComponents intrinsic_components_from_string(const std::string& s) {
  if (s == "rair_only" || s == "rair") return IntrinsicComponents::RaIROnly;
  if (s == "disagreement_only" || s == "disagreement") return IntrinsicComponents::DisagreementOnly;
  if (s == "combined") return IntrinsicComponents::Combined;
  throw ConfigError("unknown intrinsic components '" + s + "' (expected rair_only, disagreement_only or combined)");
}

void IntrinsicSpec::validate() const {
  phi.validate(2);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("intrinsic.lambda must be >= 0");
  if (components == IntrinsicComponents::RaIROnly && lambda != 0.0) {
    throw ConfigError("intrinsic.components=rair_only requires intrinsic.lambda=0");
  }
  if (components == IntrinsicComponents::Combined && lambda == 0.0) {
    throw ConfigError("intrinsic.components=combined requires intrinsic.lambda>0");
  }
}

Objective IntrinsicSpec::objective() const {
  switch (components) {
    case IntrinsicComponents::RaIROnly: return {phi, 1.0, 0.0};
    case IntrinsicComponents::DisagreementOnly: return {phi, 0.0, 1.0};
    case IntrinsicComponents::Combined: return {phi, 1.0, lambda};
  }
  return {phi, 1.0, lambda};
}

nlohmann::json IntrinsicSpec::to_json() const {
  return {{"phi", to_string(phi.variant)},
          {"bin_size", phi.bin_size},
          {"include_color", phi.include_color},
          {"axis_tagged", phi.axis_tagged},
          {"lambda", lambda},
          {"components", to_string(components)}};
}

double intrinsic_reward(std::span<const double> predictions, int members, const IntrinsicSpec& spec,
                        const Configuration& like) {
  const Objective obj = spec.objective();
  if (obj.disagreement_weight > 0.0 && members < 2) throw Error("disagreement needs at least 2 ensemble members");
  return make_step_reward(obj, like)(predictions, members);
}

void FreePlayConfig::validate() const {
  if (iterations < 1) throw ConfigError("freeplay.iterations must be positive");
  if (rollouts_per_iter < 1) throw ConfigError("freeplay.rollouts_per_iter must be positive");
  if (episode_length < 1) throw ConfigError("freeplay.episode_length must be positive");
  if (checkpoint_every < 1) throw ConfigError("freeplay.checkpoint_every must be positive");
  planner.validate();
  ensemble.validate();
  env.validate();
}

nlohmann::json IterationMetrics::to_json() const {
  return {{"iteration", iteration},
          {"best_rair", best_rair},
          {"mean_rair", mean_rair},
          {"mean_disagreement", mean_disagreement},
          {"moved_fraction", moved_fraction},
          {"adjacent_fraction", adjacent_fraction},
          {"member_loss", member_loss},
          {"buffer_size", buffer_size}};
}

bool has_adjacent_pair(const Configuration& state) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = i + 1; j < state.size(); ++j) {
      const int dc = std::abs(state.positions[i].col - state.positions[j].col);
      const int dr = std::abs(state.positions[i].row - state.positions[j].row);
      if (std::max(dc, dr) <= 1) return true;
    }
  }
  return false;
}

IterationMetrics compute_metrics(int iteration, const std::vector<RolloutRecord>& rollouts) {
  IterationMetrics m;
  m.iteration = iteration;
  double best = -std::numeric_limits<double>::infinity();
  double rair_sum = 0.0;
  double dis_sum = 0.0;
  std::size_t steps = 0;
  std::size_t moved = 0;
  std::size_t adjacent = 0;
  for (const auto& r : rollouts) {
    for (std::size_t t = 0; t < r.steps.size(); ++t) {
      const auto& s = r.steps[t];
      best = std::max(best, s.rair);
      rair_sum += s.rair;
      dis_sum += s.disagreement;
      if (s.moved) ++moved;
      const Configuration& next = t + 1 < r.steps.size() ? r.steps[t + 1].state : r.final_state;
      if (has_adjacent_pair(next)) ++adjacent;
      ++steps;
    }
  }
  if (steps == 0) throw Error("no steps to summarize");
  const auto n = static_cast<double>(steps);
  m.best_rair = best;
  m.mean_rair = rair_sum / n;
  m.mean_disagreement = dis_sum / n;
  m.moved_fraction = static_cast<double>(moved) / n;
  m.adjacent_fraction = static_cast<double>(adjacent) / n;
  return m;
}

std::string metrics_csv_header() {
  return "iteration,best_rair,mean_rair,mean_disagreement,moved_fraction,adjacent_fraction,buffer_size,member_loss\n";
}

std::string metrics_csv_row(const IterationMetrics& m) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << m.iteration << ',' << num(m.best_rair) << ',' << num(m.mean_rair) << ',' << num(m.mean_disagreement) << ','
     << num(m.moved_fraction) << ',' << num(m.adjacent_fraction) << ',' << m.buffer_size << ',';
  for (std::size_t i = 0; i < m.member_loss.size(); ++i) {
    if (i) os << ';';
    os << num(m.member_loss[i]);
  }
  os << '\n';
  return os.str();
}

namespace {

void save_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  auto put = [&](std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFFu));
  };
  put(buffer.size(), 8);
  put(buffer.input_dim(), 4);
  put(buffer.target_dim(), 4);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    for (double v : buffer.input(i)) put(std::bit_cast<std::uint64_t>(v), 8);
    for (double v : buffer.target(i)) put(std::bit_cast<std::uint64_t>(v), 8);
  }
}

std::filesystem::path write_checkpoint(const Ensemble& ensemble, const std::filesystem::path& dir,
                                       const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto bin = dir / (stem + ".bin");
  ensemble.save(bin);
  std::ofstream js(dir / (stem + ".json"), std::ios::trunc);
  js << ensemble.sidecar().dump(2) << '\n';
  if (!js) throw Error("cannot write checkpoint sidecar in " + dir.string());
  return bin;
}

}  // namespace

FreePlayResult run_free_play(const FreePlayConfig& config, const IntrinsicSpec& spec, int workers,
                             const FreePlayCallbacks& callbacks) {
  config.validate();
  spec.validate();
  const GridWorld world(config.env);
  EnsembleConfig ec = config.ensemble;
  ec.seed = derive_seed(config.seed, "ensemble");
  FreePlayResult result{Ensemble(ec, config.env.num_entities, config.env.width, config.env.height,
                                 config.env.persistency_T),
                        ReplayBuffer{}, {}, {}};
  result.buffer = result.ensemble.make_buffer();
  const Objective objective = spec.objective();

  for (int it = 1; it <= config.iterations; ++it) {
    try {
      std::vector<RolloutRecord> rollouts;
      for (int r = 0; r < config.rollouts_per_iter; ++r) {
        const auto iu = static_cast<std::uint64_t>(it);
        const auto ru = static_cast<std::uint64_t>(r);
        const Configuration start = world.reset(derive_seed(config.seed, "env", {iu, ru}));
        PlannerConfig pc = config.planner;
        pc.seed = derive_seed(config.seed, "planner", {iu, ru});
        MpcOptions options;
        options.workers = workers;
        options.on_step = [&](const StepRecord& rec, const Configuration& next) {
          result.ensemble.record(result.buffer, rec.state, rec.action, next);
        };
        rollouts.push_back(
            mpc_rollout(result.ensemble, world, start, pc, objective, config.episode_length, options));
        if (callbacks.on_rollout) callbacks.on_rollout(it, r, rollouts.back());
      }
      IterationMetrics m = compute_metrics(it, rollouts);
      for (int e = 0; e < config.ensemble.epochs; ++e) m.member_loss = result.ensemble.train_epoch(result.buffer);
      m.buffer_size = result.buffer.size();
      if (callbacks.checkpoint_dir && (it % config.checkpoint_every == 0 || it == config.iterations)) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "ensemble_%04d", it);
        result.checkpoints.push_back(write_checkpoint(result.ensemble, *callbacks.checkpoint_dir, stem));
      }
      if (callbacks.on_iteration) callbacks.on_iteration(m);
      result.metrics.push_back(std::move(m));
    } catch (...) {
      if (callbacks.checkpoint_dir) {
        write_checkpoint(result.ensemble, *callbacks.checkpoint_dir, "ensemble_aborted");
        save_buffer(result.buffer, *callbacks.checkpoint_dir / "buffer_aborted.bin");
      }
      throw;
    }
  }
  return result;
}

}  // namespace rair
