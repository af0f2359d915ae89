#include <gtest/gtest.h>

#include <set>

#include "rair/error.hpp"
#include "rair/gridworld.hpp"
#include "rair/rng.hpp"

namespace rair {
namespace {

GridConfig small(int w, int h, int n) {
  GridConfig c;
  c.width = w;
  c.height = h;
  c.num_entities = n;
  return c;
}

std::set<std::pair<int, int>> cells(const Configuration& s) {
  std::set<std::pair<int, int>> out;
  for (const auto& p : s.positions) out.insert({p.col, p.row});
  return out;
}

TEST(GridConfigTest, Validation) {
  EXPECT_THROW(small(0, 5, 1).validate(), ConfigError);
  EXPECT_THROW(small(3, 3, 10).validate(), ConfigError);
  GridConfig t = small(5, 5, 2);
  t.persistency_T = 0;
  EXPECT_THROW(t.validate(), ConfigError);
  GridConfig f = small(5, 5, 2);
  f.frozen_mask = {true, true};
  EXPECT_THROW(f.validate(), ConfigError);
  GridConfig m = small(5, 5, 2);
  m.frozen_mask = {true};
  EXPECT_THROW(m.validate(), ConfigError);
  EXPECT_NO_THROW(small(5, 5, 25).validate());
}

TEST(DiscretizeAction, Thresholds) {
  EXPECT_EQ(discretize_action(0.0), 0);
  EXPECT_EQ(discretize_action(0.33), 0);
  EXPECT_EQ(discretize_action(0.34), 1);
  EXPECT_EQ(discretize_action(-0.9), -1);
  EXPECT_EQ(discretize_action(5.0), 1);
  EXPECT_EQ(discretize_action(std::nan("")), 0);
}

TEST(Reset, Deterministic) {
  GridWorld w(small(25, 25, 16));
  EXPECT_EQ(w.reset(3), w.reset(3));
  EXPECT_NE(w.reset(3), w.reset(4));
}

TEST(Reset, FullGrid) {
  GridWorld w(small(4, 3, 12));
  EXPECT_EQ(cells(w.reset(1)).size(), 12u);
}

TEST(Reset, SixteenOnTwentyFive) {
  GridWorld w(small(25, 25, 16));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto st = w.reset(s);
    EXPECT_EQ(cells(st).size(), 16u);
    for (const auto& p : st.positions) EXPECT_TRUE(w.in_bounds(p));
    EXPECT_NO_THROW(w.check_state(st));
  }
}

TEST(Reset, ColorsCoverPalette) {
  GridConfig c = small(10, 10, 7);
  c.colors_c = 3;
  const auto st = GridWorld(c).reset(2);
  ASSERT_EQ(st.colors.size(), 7u);
  std::vector<int> count(3, 0);
  for (int k : st.colors) count[k]++;
  EXPECT_EQ(count, (std::vector<int>{3, 2, 2}));
}

TEST(Step, Examples) {
  GridWorld w(small(5, 5, 2));
  const auto s0 = w.place({{2, 2}, {3, 3}});
  const auto idle = w.step(s0, {0.0, 0.0});
  EXPECT_EQ(idle.positions, s0.positions);
  EXPECT_EQ(idle.cursor.remaining, s0.cursor.remaining - 1);
  EXPECT_EQ(idle.step_count, 1u);

  const auto diag = w.step(s0, {0.9, -0.9});
  EXPECT_EQ(diag.positions[0], (Cell{3, 1}));

  const auto blocked = w.step(s0, {0.9, 0.9});
  EXPECT_EQ(blocked.positions, s0.positions);

  const auto wall = w.step(w.place({{0, 0}, {3, 3}}), {-1.0, 0.0});
  EXPECT_EQ(wall.positions[0], (Cell{0, 0}));
}

TEST(Step, FourNeighborhoodKeepsDominantAxis) {
  GridConfig c = small(5, 5, 1);
  c.diagonal_moves = false;
  GridWorld w(c);
  const auto s = w.place({{2, 2}});
  EXPECT_EQ(w.step(s, {0.9, -0.5}).positions[0], (Cell{3, 2}));
  EXPECT_EQ(w.step(s, {0.4, -0.8}).positions[0], (Cell{2, 1}));
}

TEST(Step, PlaceRejectsOverlap) {
  GridWorld w(small(5, 5, 2));
  EXPECT_THROW(w.place({{1, 1}, {1, 1}}), Error);
  EXPECT_THROW(w.place({{1, 1}, {9, 1}}), Error);
  EXPECT_THROW(w.place({{1, 1}}), Error);
}

TEST(GridProperty, NoOverlapUnderRandomDriving) {
  GridWorld w(small(6, 6, 20));
  Rng rng(21);
  auto s = w.reset(5);
  for (int t = 0; t < 20000; ++t) {
    s = w.step(s, {2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0});
    ASSERT_EQ(cells(s).size(), 20u);
    for (const auto& p : s.positions) ASSERT_TRUE(w.in_bounds(p));
  }
  EXPECT_NO_THROW(w.check_state(s));
}

TEST(GridProperty, RoundRobinFairness) {
  GridConfig c = small(10, 10, 5);
  c.persistency_T = 4;
  c.frozen_mask = {false, true, false, false, true};
  GridWorld w(c);
  auto s = w.reset(1);
  for (int offset = 0; offset < 7; ++offset) {
    std::vector<int> actuated(5, 0);
    auto t = s;
    for (int k = 0; k < 3 * 4; ++k) {
      actuated[t.cursor.entity]++;
      t = w.step(t, {0.0, 0.0});
    }
    EXPECT_EQ(actuated, (std::vector<int>{4, 0, 4, 4, 0}));
    s = w.step(s, {0.0, 0.0});
  }
}

TEST(GridProperty, CursorSkipsFrozen) {
  const Cursor c = advance_cursor({0, 1}, {false, true, true, false}, 10);
  EXPECT_EQ(c, (Cursor{3, 10}));
  EXPECT_EQ(advance_cursor({0, 5}, {false}, 10), (Cursor{0, 4}));
}

TEST(GridProperty, Deterministic) {
  GridWorld w(small(8, 8, 6));
  const auto s = w.reset(9);
  EXPECT_EQ(w.step(s, {0.5, -0.5}), w.step(s, {0.5, -0.5}));
}

TEST(GridProperty, Reversibility) {
  GridWorld w(small(9, 9, 1));
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const auto s = w.place({{1 + static_cast<int>(uniform_index(rng, 7)), 1 + static_cast<int>(uniform_index(rng, 7))}});
    const double ax = static_cast<double>(uniform_index(rng, 3)) - 1.0;
    const double ay = static_cast<double>(uniform_index(rng, 3)) - 1.0;
    const auto back = w.step(w.step(s, {ax, ay}), {-ax, -ay});
    EXPECT_EQ(back.positions, s.positions);
  }
}

TEST(EntityViews, Examples) {
  GridWorld plain(small(5, 5, 2));
  for (const auto& v : entity_views(plain.reset(0))) EXPECT_FALSE(v.color.has_value());

  GridConfig c = small(5, 5, 3);
  c.colors_c = 3;
  for (const auto& v : entity_views(GridWorld(c).reset(0))) {
    ASSERT_TRUE(v.color.has_value());
    EXPECT_EQ(v.color->length, 2);
  }

  GridConfig f = small(6, 6, 2);
  f.frozen_mask = {true, false};
  const auto views = entity_views(GridWorld(f).place({{4, 4}, {0, 0}}));
  EXPECT_TRUE(views[0].frozen);
  EXPECT_EQ(views[0].coord(0), 4.0);
  EXPECT_EQ(views[0].coord(1), 4.0);
  EXPECT_FALSE(views[1].frozen);
}

TEST(FrozenEntities, NeverMove) {
  GridConfig f = small(6, 6, 3);
  f.frozen_mask = {false, true, false};
  GridWorld w(f);
  auto s = w.reset(4);
  const Cell frozen_at = s.positions[1];
  Rng rng(23);
  for (int t = 0; t < 500; ++t) {
    s = w.step(s, {2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0});
    EXPECT_NE(s.cursor.entity, 1);
    EXPECT_EQ(s.positions[1], frozen_at);
  }
}

TEST(Serialization, JsonRoundTrip) {
  GridConfig c = small(7, 7, 4);
  c.colors_c = 2;
  c.frozen_mask = {false, false, true, false};
  GridWorld w(c);
  auto s = w.reset(6);
  s = w.step(s, {1.0, 1.0});
  EXPECT_EQ(configuration_from_json(to_json(s)), s);
}

TEST(Render, Ascii) {
  GridConfig c = small(3, 2, 2);
  c.frozen_mask = {false, true};
  const auto s = GridWorld(c).place({{0, 0}, {2, 1}});
  EXPECT_EQ(render_ascii(s, 3, 2), "o..\n..#\n");
  GridConfig k = small(3, 1, 2);
  k.colors_c = 2;
  EXPECT_EQ(render_ascii(GridWorld(k).place({{0, 0}, {1, 0}}, {1, 0}), 3, 1), "BA.\n");
}

TEST(Render, PpmHeaderAndDeterminism) {
  GridWorld w(small(5, 4, 3));
  const auto s = w.reset(1);
  const auto img = render_ppm(s, 5, 4, 6);
  const std::string header = "P6\n30 24\n255\n";
  ASSERT_GE(img.size(), header.size());
  EXPECT_EQ(std::string(img.begin(), img.begin() + static_cast<long>(header.size())), header);
  EXPECT_EQ(img.size(), header.size() + 30u * 24u * 3u);
  EXPECT_EQ(img, render_ppm(s, 5, 4, 6));
  EXPECT_THROW(render_ppm(s, 5, 4, 2), Error);
}

}  // namespace
}  // namespace rair
