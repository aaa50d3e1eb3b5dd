#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sls;

namespace {

std::vector<oracle::end_component> as_plain(const gamec_set& gs) {
  std::vector<oracle::end_component> out;
  for (const auto& c : gs.components) out.push_back({c.states, c.enabled});
  return out;
}

rabin_pair pair_of(std::vector<char> L, std::vector<char> K) { return {std::move(L), std::move(K)}; }

}  // namespace

TEST(Scc, Cycle) {
  digraph g{{1}, {2}, {0}};
  auto c = strongly_connected_components(g);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Scc, Dag) {
  digraph g{{1, 2}, {3}, {3}, {}};
  EXPECT_EQ(strongly_connected_components(g).size(), 4u);
}

TEST(Scc, RandomGraphsMatchClosure) {
  oracle::rng r(43);
  for (int k = 0; k < 20; ++k) {
    digraph g(50);
    for (auto& adj : g)
      for (std::size_t j = 0; j < 50; ++j)
        if (oracle::uniform(r) < 0.04) adj.push_back(j);
    EXPECT_EQ(strongly_connected_components(g), oracle::closure_sccs(g));
  }
}

TEST(Scc, DeepChainDoesNotOverflow) {
  const std::size_t n = 200000;
  digraph g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g[i].push_back(i + 1);
  g[n - 1].push_back(0);
  EXPECT_EQ(strongly_connected_components(g).size(), 1u);
}

TEST(Gamec, AbsorbingAcceptingState) {
  game_builder b({"a"});
  b.add_state("s", 1, {"stay"}, {"x"});
  b.add(0, 0, 0, 0, 1.0);
  auto g = std::move(b).build();
  auto gs = compute_gamecs(g, {pair_of({0}, {1})});
  ASSERT_EQ(gs.components.size(), 1u);
  EXPECT_EQ(gs.components[0].states, std::vector<std::size_t>{0});
  EXPECT_TRUE(gs.in_E[0]);
}

TEST(Gamec, StatePushedOutByAdversaryIsExcluded) {
  // s0 has two actions; each can be pushed to the sink s2 by some adversary
  // action, so only the sink remains closed.
  game_builder b({"a"});
  b.add_state("s0", 1, {"l", "r"}, {"x", "y"});
  b.add_state("s1", 1, {"go"}, {"x"});
  b.add_state("s2", 0, {"stay"}, {"x"});
  b.add(0, 0, 0, 1, 1.0);
  b.add(0, 0, 1, 2, 1.0);
  b.add(0, 1, 0, 2, 1.0);
  b.add(0, 1, 1, 1, 1.0);
  b.add(1, 0, 0, 0, 1.0);
  b.add(2, 0, 0, 2, 1.0);
  auto g = std::move(b).build();
  auto gs = compute_gamecs(g, {pair_of({0, 0, 0}, {1, 1, 1})});
  ASSERT_EQ(gs.components.size(), 1u);
  EXPECT_EQ(gs.components[0].states, std::vector<std::size_t>{2});
  EXPECT_FALSE(gs.in_E[0]);
  EXPECT_FALSE(gs.in_E[1]);
}

TEST(Gamec, RejectsComponentsTouchingL) {
  game_builder b({"a"});
  b.add_state("s0", 0, {"go"}, {"x"});
  b.add_state("s1", 0, {"go"}, {"x"});
  b.add(0, 0, 0, 1, 1.0);
  b.add(1, 0, 0, 0, 1.0);
  auto g = std::move(b).build();
  EXPECT_TRUE(compute_gamecs(g, {pair_of({1, 0}, {0, 1})}).components.empty());
  EXPECT_EQ(compute_gamecs(g, {pair_of({1, 0}, {0, 1}), pair_of({0, 0}, {1, 0})}).components.at(0).pair, 1u);
}

TEST(Gamec, MatchesExhaustiveEnumeration) {
  oracle::rng r(47);
  for (int k = 0; k < 200; ++k) {
    oracle::game_shape shape;
    shape.states = oracle::pick(r, 1, 4);
    shape.zero_one = k % 2 == 0;
    shape.max_support = 2;
    auto g = oracle::random_game(r, shape);
    auto pairs = oracle::random_pairs(r, g.num_states(), oracle::pick(r, 1, 2));
    ASSERT_EQ(as_plain(compute_gamecs(g, pairs)), oracle::brute_force_gamecs(g, pairs)) << write_game(g);
  }
}

TEST(Gamec, ComponentsAreClosedAndConnected) {
  oracle::rng r(53);
  for (int k = 0; k < 50; ++k) {
    oracle::game_shape shape;
    shape.states = 12;
    shape.max_controller = 3;
    shape.max_support = 2;
    auto g = oracle::random_game(r, shape);
    auto pairs = oracle::random_pairs(r, g.num_states(), 1);
    auto gs = compute_gamecs(g, pairs);
    for (const auto& c : gs.components) {
      auto local = restrict_to_component(g, c);
      EXPECT_EQ(local.game.num_states(), c.states.size());
      digraph d(c.states.size());
      for (std::size_t i = 0; i < c.states.size(); ++i)
        for (std::size_t uc = 0; uc < local.game.num_controller_actions(i); ++uc)
          for (std::size_t ua = 0; ua < local.game.num_adversary_actions(i); ++ua)
            for (const auto& t : local.game.row(i, uc, ua)) d[i].push_back(t.target);
      EXPECT_EQ(strongly_connected_components(d).size(), 1u);
    }
    for (std::size_t h = 1; h < gs.components.size(); ++h)
      EXPECT_LT(gs.components[h - 1].states.front(), gs.components[h].states.front());
  }
}

TEST(Gamec, Deterministic) {
  oracle::rng r(59);
  oracle::game_shape shape;
  shape.states = 30;
  shape.max_support = 2;
  auto g = oracle::random_game(r, shape);
  auto pairs = oracle::random_pairs(r, g.num_states(), 2);
  EXPECT_EQ(write_gamecs(g, compute_gamecs(g, pairs)), write_gamecs(g, compute_gamecs(g, pairs)));
}
