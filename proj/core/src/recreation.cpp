#include <algorithm>
#include <numeric>

#include "rair/error.hpp"
#include "rair/freeplay.hpp"

namespace rair {

void RecreationConfig::validate() const {
  if (template_cells.size() < 2) throw ConfigError("template too small");
  if (movable < 1) throw ConfigError("recreate.movable must be positive");
  if (rollouts < 1) throw ConfigError("recreate.rollouts must be positive");
  if (episode_length < 1) throw ConfigError("recreate.episode_length must be positive");
  if (!(bin_size > 0.0)) throw ConfigError("recreate.bin_size must be positive");
  planner.validate();
  for (std::size_t i = 0; i < template_cells.size(); ++i) {
    const Cell c = template_cells[i];
    if (c.col < 0 || c.row < 0 || c.col >= env.width || c.row >= env.height) {
      throw ConfigError("template cell outside the grid");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (template_cells[j] == c) throw ConfigError("template cells must be distinct");
    }
  }
  if (!movable_start.empty()) {
    if (static_cast<int>(movable_start.size()) != movable) {
      throw ConfigError("recreate.movable_start must list one cell per movable entity");
    }
    for (const Cell c : movable_start) {
      if (std::find(template_cells.begin(), template_cells.end(), c) != template_cells.end()) {
        throw ConfigError("movable start overlaps the template");
      }
    }
  } else {
    if (spawn_col0 < 0 || spawn_row0 < 0 || spawn_col1 > env.width || spawn_row1 > env.height ||
        spawn_col0 >= spawn_col1 || spawn_row0 >= spawn_row1) {
      throw ConfigError("recreate spawn region must be a non-empty rectangle inside the grid");
    }
    for (const Cell c : template_cells) {
      if (c.col >= spawn_col0 && c.col < spawn_col1 && c.row >= spawn_row0 && c.row < spawn_row1) {
        throw ConfigError("template overlaps the movable spawn region");
      }
    }
    if (static_cast<long long>(spawn_col1 - spawn_col0) * (spawn_row1 - spawn_row0) < movable) {
      throw ConfigError("spawn region has fewer cells than movable entities");
    }
  }
  resolved_env().validate();
}

GridConfig RecreationConfig::resolved_env() const {
  GridConfig g = env;
  g.num_entities = static_cast<int>(template_cells.size()) + movable;
  g.frozen_mask.assign(g.num_entities, false);
  for (std::size_t i = 0; i < template_cells.size(); ++i) g.frozen_mask[i] = true;
  g.colors_c = 0;
  return g;
}

namespace {

PhiSpec recreation_phi(double bin) {
  PhiSpec phi = PhiSpec::relational(PhiVariant::AbsRelativePosition, bin);
  phi.subspace = {0, 1};
  return phi;
}

std::vector<EntityView> views_of(const std::vector<Cell>& cells) {
  std::vector<EntityView> v;
  for (const Cell c : cells) v.push_back(EntityView::at(c.col, c.row));
  return v;
}

}  // namespace

std::pair<Symbol, std::uint64_t> template_dominant_relation(const std::vector<Cell>& cells) {
  if (cells.size() < 2) throw Error("template too small");
  const auto h = build_multiset_relational(views_of(cells), recreation_phi(1.0));
  // highest multiplicity; ties go to the lexicographically smallest symbol
  const auto* best = &h.entries().front();
  for (const auto& e : h.entries()) {
    if (e.second > best->second) best = &e;
  }
  return {best->first, best->second};
}

bool recreation_satisfied(const Configuration& state, const Symbol& relation, std::uint64_t required) {
  std::vector<Cell> movable;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.frozen[i]) movable.push_back(state.positions[i]);
  }
  if (movable.size() < 2) return required == 0;
  const auto h = build_multiset_relational(views_of(movable), recreation_phi(1.0));
  return h.count(relation) >= required;
}

nlohmann::json RecreationReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rollouts) {
    rs.push_back({{"rollout", r.rollout},
                  {"success", r.success},
                  {"success_at_start", r.success_at_start},
                  {"initial_rair", r.initial_rair},
                  {"final_rair", r.final_rair},
                  {"final_state", rair::to_json(r.final_state)}});
  }
  return {{"dominant_relation", dominant_relation},
          {"template_multiplicity", template_multiplicity},
          {"required_multiplicity", template_multiplicity - 1},
          {"fraction", fraction},
          {"fraction_at_start", fraction_at_start},
          {"rollouts", rs}};
}

RecreationReport run_recreation(const RecreationConfig& config, int workers,
                                const std::function<void(int, const RolloutRecord&)>& on_rollout) {
  config.validate();
  const GridConfig genv = config.resolved_env();
  const GridWorld world(genv);
  const GroundTruthModel model(world);
  const auto [relation, mult] = template_dominant_relation(config.template_cells);
  const std::uint64_t required = mult - 1;

  RecreationReport report;
  report.dominant_relation.assign(relation.values.begin(), relation.values.begin() + relation.width);
  report.template_multiplicity = mult;

  Objective objective;
  objective.phi = recreation_phi(config.bin_size);

  int successes = 0;
  int at_start = 0;
  for (int r = 0; r < config.rollouts; ++r) {
    const auto ru = static_cast<std::uint64_t>(r);
    std::vector<Cell> cells = config.template_cells;
    if (!config.movable_start.empty()) {
      cells.insert(cells.end(), config.movable_start.begin(), config.movable_start.end());
    } else {
      const int w = config.spawn_col1 - config.spawn_col0;
      const int h = config.spawn_row1 - config.spawn_row0;
      std::vector<int> order(static_cast<std::size_t>(w) * h);
      std::iota(order.begin(), order.end(), 0);
      Rng rng(derive_seed(config.seed, "spawn", {ru}));
      for (int i = 0; i < config.movable; ++i) {
        const auto j = i + static_cast<int>(uniform_index(rng, order.size() - i));
        std::swap(order[i], order[j]);
        cells.push_back({config.spawn_col0 + order[i] % w, config.spawn_row0 + order[i] / w});
      }
    }
    const Configuration start = world.place(cells);
    PlannerConfig pc = config.planner;
    pc.seed = derive_seed(config.seed, "planner", {ru});
    MpcOptions options;
    options.workers = workers;
    const RolloutRecord rec = mpc_rollout(model, world, start, pc, objective, config.episode_length, options);
    if (on_rollout) on_rollout(r, rec);

    RecreationRollout out;
    out.rollout = r;
    out.success_at_start = recreation_satisfied(start, relation, required);
    out.success = recreation_satisfied(rec.final_state, relation, required);
    out.initial_rair = rec.initial_rair;
    out.final_rair = rec.final_rair();
    out.final_state = rec.final_state;
    successes += out.success ? 1 : 0;
    at_start += out.success_at_start ? 1 : 0;
    report.rollouts.push_back(std::move(out));
  }
  report.fraction = static_cast<double>(successes) / config.rollouts;
  report.fraction_at_start = static_cast<double>(at_start) / config.rollouts;
  return report;
}

}  // namespace rair
