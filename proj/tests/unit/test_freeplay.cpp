#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "rair/error.hpp"
#include "rair/freeplay.hpp"

namespace rair {
namespace {

FreePlayConfig tiny(int iterations = 1, int rollouts = 2, int length = 10) {
  FreePlayConfig c;
  c.iterations = iterations;
  c.rollouts_per_iter = rollouts;
  c.episode_length = length;
  c.checkpoint_every = 1;
  c.env.width = 8;
  c.env.height = 8;
  c.env.num_entities = 4;
  c.planner.samples_P = 12;
  c.planner.horizon_H = 4;
  c.planner.elites_K = 4;
  c.planner.cem_iterations = 2;
  c.ensemble.members = 3;
  c.ensemble.hidden = {16};
  c.ensemble.epochs = 2;
  c.seed = 3;
  return c;
}

IntrinsicSpec combined(double lambda = 0.1) {
  IntrinsicSpec s;
  s.lambda = lambda;
  return s;
}

TEST(IntrinsicSpecTest, Validation) {
  IntrinsicSpec s;
  s.components = IntrinsicComponents::RaIROnly;
  s.lambda = 0.1;
  EXPECT_THROW(s.validate(), ConfigError);
  s.lambda = 0.0;
  EXPECT_NO_THROW(s.validate());
  s.components = IntrinsicComponents::Combined;
  EXPECT_THROW(s.validate(), ConfigError);
  s.lambda = -1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_EQ(intrinsic_components_from_string("disagreement_only"), IntrinsicComponents::DisagreementOnly);
  EXPECT_THROW(intrinsic_components_from_string("both"), ConfigError);
}

TEST(IntrinsicReward, Examples) {
  GridConfig g;
  g.width = 10;
  g.height = 10;
  g.num_entities = 2;
  const auto like = GridWorld(g).place({{0, 0}, {3, 0}});
  const std::vector<double> m0{0, 0, 2, 0};
  const std::vector<double> m1{0, 0, 4, 0};
  std::vector<double> preds = m0;
  preds.insert(preds.end(), m1.begin(), m1.end());

  IntrinsicSpec raw;
  raw.components = IntrinsicComponents::RaIROnly;
  raw.lambda = 0.0;
  std::vector<EntityView> mean_views{EntityView::at(0, 0), EntityView::at(3, 0)};
  EXPECT_EQ(intrinsic_reward(preds, 2, raw, like), rair_reward(mean_views, raw.phi));

  std::vector<double> same = m0;
  same.insert(same.end(), m0.begin(), m0.end());
  const std::vector<EntityView> m0_views{EntityView::at(0, 0), EntityView::at(2, 0)};
  EXPECT_EQ(intrinsic_reward(same, 2, combined(), like), rair_reward(m0_views, combined().phi));

  // two entities: r_RaIR = 0, disagreement 2
  const std::vector<double> a{0, 0, 1, 1};
  const std::vector<double> b{0, 0, 3, 3};
  std::vector<double> spread = a;
  spread.insert(spread.end(), b.begin(), b.end());
  EXPECT_NEAR(intrinsic_reward(spread, 2, combined(0.1), like), 0.0 + 0.1 * 2.0, 1e-12);

  IntrinsicSpec dis_only;
  dis_only.components = IntrinsicComponents::DisagreementOnly;
  EXPECT_NEAR(intrinsic_reward(spread, 2, dis_only, like), 2.0, 1e-12);
  EXPECT_THROW(intrinsic_reward(m0, 1, combined(), like), Error);
}

TEST(IntrinsicReward, WeightedCombination) {
  // -1.0 + 0.1 * 2.0
  const double r = -1.0;
  const double d = 2.0;
  const Objective o = combined(0.1).objective();
  EXPECT_NEAR(o.rair_weight * r + o.disagreement_weight * d, -0.8, 1e-15);
  IntrinsicSpec dis_only;
  dis_only.components = IntrinsicComponents::DisagreementOnly;
  EXPECT_EQ(dis_only.objective().rair_weight, 0.0);
  EXPECT_EQ(dis_only.objective().disagreement_weight, 1.0);
}

TEST(FreePlay, BufferBookkeeping) {
  const auto r = run_free_play(tiny(1, 2, 10), combined());
  EXPECT_EQ(r.buffer.size(), 20u);
  const auto r3 = run_free_play(tiny(3, 2, 5), combined());
  ASSERT_EQ(r3.metrics.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(r3.metrics[i].buffer_size, static_cast<std::size_t>((i + 1) * 2 * 5));
}

TEST(FreePlay, MetricsWithinBounds) {
  const auto r = run_free_play(tiny(2, 2, 6), combined());
  for (const auto& m : r.metrics) {
    EXPECT_LE(m.best_rair, 0.0);
    EXPECT_GE(m.moved_fraction, 0.0);
    EXPECT_LE(m.moved_fraction, 1.0);
    EXPECT_GE(m.adjacent_fraction, 0.0);
    EXPECT_LE(m.adjacent_fraction, 1.0);
    EXPECT_EQ(m.member_loss.size(), 3u);
  }
}

TEST(FreePlay, Deterministic) {
  const auto a = run_free_play(tiny(2, 2, 6), combined());
  const auto b = run_free_play(tiny(2, 2, 6), combined(), 4);
  ASSERT_EQ(a.metrics.size(), b.metrics.size());
  for (std::size_t i = 0; i < a.metrics.size(); ++i) EXPECT_EQ(a.metrics[i].to_json(), b.metrics[i].to_json());
  for (int m = 0; m < 3; ++m) EXPECT_TRUE(a.ensemble.member(m) == b.ensemble.member(m));
}

TEST(FreePlay, CheckpointsReloadBitwise) {
  const auto dir = std::filesystem::temp_directory_path() / "rair_fp_ckpt_test";
  std::filesystem::remove_all(dir);
  FreePlayCallbacks cb;
  cb.checkpoint_dir = dir;
  const auto cfg = tiny(2, 1, 6);
  const auto r = run_free_play(cfg, combined(), 1, cb);
  ASSERT_EQ(r.checkpoints.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "ensemble_0002.json"));
  Ensemble loaded(cfg.ensemble, cfg.env.num_entities, cfg.env.width, cfg.env.height, cfg.env.persistency_T);
  loaded.load(r.checkpoints.back());
  GridWorld w(cfg.env);
  const auto s = w.reset(11);
  EXPECT_EQ(loaded.predict(s, {0.7, -0.2}), r.ensemble.predict(s, {0.7, -0.2}));
  std::filesystem::remove_all(dir);
}

// Offline recomputation from the logged JSON, independent of compute_metrics.
TEST(FreePlay, MetricsRecomputableFromLogs) {
  std::vector<std::vector<nlohmann::json>> logs;
  FreePlayCallbacks cb;
  cb.on_rollout = [&](int it, int r, const RolloutRecord& rec) {
    if (static_cast<int>(logs.size()) < it) logs.resize(static_cast<std::size_t>(it));
    (void)r;
    for (const auto& s : rec.steps) logs[static_cast<std::size_t>(it - 1)].push_back(nlohmann::json::parse(s.to_json().dump()));
  };
  const auto r = run_free_play(tiny(2, 3, 7), combined(), 1, cb);
  ASSERT_EQ(logs.size(), 2u);
  for (int it = 0; it < 2; ++it) {
    double best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double dis = 0.0;
    int moved = 0;
    int adjacent = 0;
    for (const auto& j : logs[static_cast<std::size_t>(it)]) {
      const double rr = j["rair"].get<double>();
      best = std::max(best, rr);
      sum += rr;
      dis += j["disagreement"].get<double>();
      moved += j["moved"].get<bool>() ? 1 : 0;
      auto pos = j["positions"].get<std::vector<std::vector<int>>>();
      const int a = j["actuated"].get<int>();
      pos[a][0] += j["move"][0].get<int>();
      pos[a][1] += j["move"][1].get<int>();
      bool adj = false;
      for (std::size_t p = 0; p < pos.size(); ++p)
        for (std::size_t q = p + 1; q < pos.size(); ++q)
          adj = adj || std::max(std::abs(pos[p][0] - pos[q][0]), std::abs(pos[p][1] - pos[q][1])) <= 1;
      adjacent += adj ? 1 : 0;
    }
    const double n = static_cast<double>(logs[static_cast<std::size_t>(it)].size());
    const auto& m = r.metrics[static_cast<std::size_t>(it)];
    EXPECT_EQ(m.best_rair, best);
    EXPECT_NEAR(m.mean_rair, sum / n, 1e-12);
    EXPECT_NEAR(m.mean_disagreement, dis / n, 1e-12);
    EXPECT_EQ(m.moved_fraction, moved / n);
    EXPECT_EQ(m.adjacent_fraction, adjacent / n);
  }
}

TEST(FreePlay, DisagreementOnlyRuns) {
  IntrinsicSpec s;
  s.components = IntrinsicComponents::DisagreementOnly;
  const auto r = run_free_play(tiny(1, 1, 5), s);
  EXPECT_EQ(r.metrics.size(), 1u);
  EXPECT_GT(r.metrics[0].mean_disagreement, 0.0);
}

TEST(FreePlay, RaIROnlyWithGroundTruthIsThePatternExperiment) {
  GridConfig g;
  g.width = 10;
  g.height = 10;
  g.num_entities = 5;
  GridWorld w(g);
  GroundTruthModel gt(w);
  PlannerConfig p;
  p.samples_P = 16;
  p.horizon_H = 6;
  p.elites_K = 4;
  p.cem_iterations = 2;
  IntrinsicSpec raw;
  raw.components = IntrinsicComponents::RaIROnly;
  raw.lambda = 0.0;
  const auto start = w.reset(8);
  const auto a = mpc_rollout(gt, w, start, p, raw.objective(), 10);
  const auto b = mpc_rollout(gt, w, start, p, Objective{raw.phi, 1.0, 0.0}, 10);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) EXPECT_EQ(a.steps[t].to_json(), b.steps[t].to_json());
}

TEST(FreePlay, ConfigValidation) {
  auto c = tiny();
  c.iterations = 0;
  EXPECT_THROW(run_free_play(c, combined()), ConfigError);
  c = tiny();
  c.planner.elites_K = 100;
  EXPECT_THROW(run_free_play(c, combined()), ConfigError);
}

TEST(Metrics, AdjacencyIsChebyshev) {
  GridConfig g;
  g.width = 6;
  g.height = 6;
  g.num_entities = 2;
  GridWorld w(g);
  EXPECT_TRUE(has_adjacent_pair(w.place({{1, 1}, {2, 2}})));
  EXPECT_FALSE(has_adjacent_pair(w.place({{1, 1}, {3, 2}})));
}

TEST(Metrics, CsvRowMatchesHeader) {
  IterationMetrics m;
  m.iteration = 4;
  m.member_loss = {0.5, 0.25};
  const auto header = metrics_csv_header();
  const auto row = metrics_csv_row(m);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.back(), '\n');
}

RecreationConfig spaced_line() {
  RecreationConfig c;
  c.env.width = 12;
  c.env.height = 12;
  c.template_cells = {{2, 2}, {4, 2}, {6, 2}};
  c.movable = 3;
  c.spawn_col0 = 0;
  c.spawn_row0 = 6;
  c.spawn_col1 = 12;
  c.spawn_row1 = 12;
  c.rollouts = 2;
  c.episode_length = 5;
  c.planner.samples_P = 16;
  c.planner.horizon_H = 6;
  c.planner.elites_K = 4;
  c.planner.cem_iterations = 2;
  return c;
}

TEST(Recreation, TemplateTooSmall) {
  auto c = spaced_line();
  c.template_cells = {{2, 2}};
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "template too small");
  }
}

TEST(Recreation, TemplateOverlappingSpawnRegion) {
  auto c = spaced_line();
  c.template_cells = {{2, 2}, {4, 7}};
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "template overlaps the movable spawn region");
  }
}

TEST(Recreation, DominantRelation) {
  const auto [sym, count] = template_dominant_relation({{2, 2}, {4, 2}, {6, 2}});
  EXPECT_EQ(sym, make_symbol(kTagPair, {2, 0}));
  EXPECT_EQ(count, 2u);
}

TEST(Recreation, FrozenTemplateComesFirst) {
  const auto env = spaced_line().resolved_env();
  EXPECT_EQ(env.num_entities, 6);
  EXPECT_EQ(env.frozen_mask, (std::vector<bool>{true, true, true, false, false, false}));
}

TEST(Recreation, AlreadySolvedStart) {
  auto c = spaced_line();
  c.movable_start = {{3, 8}, {5, 8}, {7, 8}};
  const auto report = run_recreation(c);
  EXPECT_EQ(report.fraction_at_start, 1.0);
  EXPECT_EQ(report.rollouts.size(), 2u);
  for (const auto& r : report.rollouts) {
    EXPECT_TRUE(r.success_at_start);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(r.final_state.positions[i], c.template_cells[i]);
  }
}

TEST(Recreation, SatisfactionCountsMovablePairsOnly) {
  GridConfig g;
  g.width = 10;
  g.height = 10;
  g.num_entities = 5;
  g.frozen_mask = {true, true, true, false, false};
  const auto s = GridWorld(g).place({{0, 0}, {2, 0}, {4, 0}, {1, 5}, {3, 5}});
  const auto rel = make_symbol(kTagPair, {2, 0});
  EXPECT_TRUE(recreation_satisfied(s, rel, 1));
  EXPECT_FALSE(recreation_satisfied(s, rel, 2));
}

}  // namespace
}  // namespace rair
