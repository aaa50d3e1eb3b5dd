#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sls;

namespace {

markov_chain chain_of(std::vector<std::vector<transition>> rows) { return markov_chain{std::move(rows)}; }

double sup_residual(const markov_chain& p, const std::vector<char>& in_E, const std::vector<double>& g,
                    const gain_bias& gb) {
  auto r = gain_bias_residuals(p, in_E, g, gb);
  return std::max({r[0], r[1], r[2]});
}

/// e -> c; at c, "short" goes through the violating state v, "detour"
/// through the clean state d; both return to e.
stochastic_game detour_game() {
  game_builder b({"obstacle"});
  b.add_state("e", 0, {"go"}, {"idle"});
  b.add_state("c", 0, {"short", "detour"}, {"idle"});
  b.add_state("v", 1, {"go"}, {"idle"});
  b.add_state("d", 0, {"go"}, {"idle"});
  b.add(0, 0, 0, 1, 1.0);
  b.add(1, 0, 0, 2, 1.0);
  b.add(1, 1, 0, 3, 1.0);
  b.add(2, 0, 0, 0, 1.0);
  b.add(3, 0, 0, 0, 1.0);
  return std::move(b).build();
}

cost_assignment obstacle_costs(const stochastic_game& g, double alpha = 20.0) {
  return assign_costs(g, ltl::parse_ltl("G !obstacle"), alpha);
}

}  // namespace

TEST(Costs, ViolatingStatesCostAlpha) {
  auto g = detour_game();
  auto c = obstacle_costs(g);
  EXPECT_EQ(c.g, (std::vector<double>{0, 0, 20, 0}));
  EXPECT_THROW(assign_costs(g, ltl::parse_ltl("F obstacle"), 20), not_invariant_form);
  EXPECT_THROW(assign_costs(g, ltl::parse_ltl("G X obstacle"), 20), not_invariant_form);
  EXPECT_THROW(assign_costs(g, ltl::parse_ltl("G !obstacle"), 0), format_error);
  EXPECT_THROW(assign_costs(g, ltl::parse_ltl("G !wall"), 20), unknown_proposition);
  auto none = assign_costs(g, ltl::parse_ltl("G true"), 20);
  EXPECT_EQ(none.g, std::vector<double>(4, 0.0));
}

TEST(GainBias, SelfLoop) {
  auto p = chain_of({{{0, 1.0}}});
  auto gb = evaluate_gain_bias(p, {1}, {0.0});
  EXPECT_EQ(gb.J[0], 0.0);
  EXPECT_EQ(gb.h[0], 0.0);
}

TEST(GainBias, TwoStateCycleCostsOneViolation) {
  auto p = chain_of({{{1, 1.0}}, {{0, 1.0}}});
  std::vector<char> in_E{1, 0};
  std::vector<double> g{0.0, 20.0};
  auto gb = evaluate_gain_bias(p, in_E, g);
  for (double j : gb.J) EXPECT_NEAR(j, 20.0, 1e-9);
  EXPECT_LE(sup_residual(p, in_E, g, gb), 1e-8);
}

TEST(GainBias, ThreeStateCycleCostsTwoViolations) {
  auto p = chain_of({{{1, 1.0}}, {{2, 1.0}}, {{0, 1.0}}});
  std::vector<char> in_E{1, 0, 0};
  std::vector<double> g{0.0, 20.0, 20.0};
  auto gb = evaluate_gain_bias(p, in_E, g);
  for (double j : gb.J) EXPECT_NEAR(j, 40.0, 1e-9);
  EXPECT_LE(sup_residual(p, in_E, g, gb), 1e-8);
}

TEST(GainBias, ImproperPairIsRejected) {
  auto p = chain_of({{{0, 1.0}}, {{1, 1.0}}});
  EXPECT_THROW(evaluate_gain_bias(p, {1, 0}, {0.0, 1.0}), improper_policy);
}

TEST(GainBias, MatchesEmbeddedChainOracle) {
  oracle::rng r(97);
  for (int k = 0; k < 100; ++k) {
    std::size_t n = oracle::pick(r, 2, 12);
    auto g = oracle::random_unichain(r, n, 1, 1);
    auto in_E = oracle::cycle_set_with_zero(r, n);
    std::vector<double> cost(n);
    for (auto& c : cost) c = oracle::uniform(r, 0.0, 30.0);
    auto p = induced_chain(g, uniform_policy(g, player::controller), uniform_policy(g, player::adversary));
    auto gb = evaluate_gain_bias(p, in_E, cost);
    Eigen::VectorXd gv = Eigen::Map<Eigen::VectorXd>(cost.data(), static_cast<Eigen::Index>(n));
    double expect = oracle::cycle_cost(p.dense(), gv, in_E);
    for (double j : gb.J) EXPECT_NEAR(j, expect, 1e-8 * std::max(1.0, expect));
    EXPECT_LE(sup_residual(p, in_E, cost, gb), 1e-8);
  }
}

TEST(GainBias, MultichainGainsPerClass) {
  // Two absorbing loops, each its own recurrent class with a cycle state.
  auto p = chain_of({{{0, 1.0}}, {{2, 1.0}}, {{1, 1.0}}, {{0, 0.5}, {1, 0.5}}});
  std::vector<char> in_E{1, 1, 0, 0};
  std::vector<double> g{3.0, 0.0, 10.0, 0.0};
  auto gb = evaluate_gain_bias(p, in_E, g);
  EXPECT_NEAR(gb.J[0], 3.0, 1e-9);
  EXPECT_NEAR(gb.J[1], 10.0, 1e-9);
  EXPECT_NEAR(gb.J[3], 6.5, 1e-9);
  EXPECT_EQ(gb.recurrent_classes.size(), 2u);
  EXPECT_LE(sup_residual(p, in_E, g, gb), 1e-8);
}

TEST(Improvement, SingleActionKeepsPolicy) {
  auto p = chain_of({{{1, 1.0}}, {{0, 1.0}}});
  game_builder b({"obstacle"});
  b.add_state("a", 0, {"go"}, {"x"});
  b.add_state("b", 1, {"go"}, {"x"});
  b.add(0, 0, 0, 1, 1.0);
  b.add(1, 0, 0, 0, 1.0);
  auto g = std::move(b).build();
  auto cost = obstacle_costs(g);
  std::vector<char> in_E{1, 0};
  auto gb = evaluate_gain_bias(g, uniform_policy(g, player::controller), uniform_policy(g, player::adversary), in_E,
                               cost);
  auto imp = improve_policy(g, gb, in_E, cost);
  EXPECT_EQ(imp.mu.dist, uniform_policy(g, player::controller).dist);
}

TEST(Improvement, DetourBeatsShortcut) {
  auto g = detour_game();
  auto cost = obstacle_costs(g);
  std::vector<char> in_E{1, 0, 0, 0};
  auto shortcut = pure_policy(g, player::controller, {0, 0, 0, 0});
  auto tau = uniform_policy(g, player::adversary);
  auto gb = evaluate_gain_bias(g, shortcut, tau, in_E, cost);
  EXPECT_NEAR(gb.J[0], 20.0, 1e-9);
  auto imp = improve_policy(g, gb, in_E, cost, &shortcut);
  EXPECT_EQ(imp.mu.dist[1], (std::vector<double>{0.0, 1.0}));
  auto after = evaluate_gain_bias(g, imp.mu, tau, in_E, cost);
  for (double j : after.J) EXPECT_NEAR(j, 0.0, 1e-9);
}

TEST(Improvement, MixedStrategyMatchesGridSearch) {
  oracle::rng r(101);
  for (int k = 0; k < 50; ++k) {
    // At c the adversary pushes into the violating state depending on both
    // players' actions.
    game_builder b({"obstacle"});
    b.add_state("e", 0, {"go"}, {"x"});
    b.add_state("c", 0, {"l", "r"}, {"x", "y"});
    b.add_state("v", 1, {"go"}, {"x"});
    b.add(0, 0, 0, 1, 1.0);
    for (std::size_t uc = 0; uc < 2; ++uc)
      for (std::size_t ua = 0; ua < 2; ++ua) {
        double p = oracle::uniform(r);
        b.add(1, uc, ua, 2, p);
        b.add(1, uc, ua, 0, 1.0 - p);
      }
    b.add(2, 0, 0, 0, 1.0);
    auto g = std::move(b).build();
    auto cost = obstacle_costs(g);
    std::vector<char> in_E{1, 0, 0};
    auto gb = evaluate_gain_bias(g, uniform_policy(g, player::controller), uniform_policy(g, player::adversary), in_E,
                                 cost);
    auto imp = improve_policy(g, gb, in_E, cost);
    Eigen::MatrixXd m = cycle_cost_matrix(g, 1, gb, in_E, cost);
    double expect = -oracle::grid_search_2xn(-m);
    EXPECT_NEAR(imp.t_star[1], expect, 2e-3);
    EXPECT_NEAR(t_mu_at(m, imp.mu.dist[1]), imp.t_star[1], 1e-9);
  }
}

TEST(PolicyIteration, ZeroCostStopsImmediately) {
  auto g = detour_game();
  auto cost = assign_costs(g, ltl::parse_ltl("G true"), 20);
  auto res = policy_iteration(g, {1, 0, 0, 0}, cost);
  EXPECT_EQ(res.iterations, 1u);
  for (double j : res.gb.J) EXPECT_EQ(j, 0.0);
}

TEST(PolicyIteration, FindsDetour) {
  auto g = detour_game();
  auto res = policy_iteration(g, {1, 0, 0, 0}, obstacle_costs(g));
  for (double j : res.gb.J) EXPECT_NEAR(j, 0.0, 1e-9);
  EXPECT_EQ(res.mu.dist[1], (std::vector<double>{0.0, 1.0}));
  EXPECT_TRUE(res.gains_non_increasing);
}

TEST(PolicyIteration, MatchesAdversaryFreeOracle) {
  oracle::rng r(103);
  for (int k = 0; k < 20; ++k) {
    std::size_t n = oracle::pick(r, 3, 10);
    auto g = oracle::random_unichain(r, n, 2, 1);
    auto in_E = oracle::cycle_set_with_zero(r, n);
    auto cost = obstacle_costs(g);
    auto res = policy_iteration(g, in_E, cost);
    double expect = oracle::acpc_mdp_brute_force(g, in_E, cost.g);
    for (double j : res.gb.J) EXPECT_NEAR(j, expect, 1e-6) << k;
  }
}

TEST(PolicyIteration, GainsNeverIncrease) {
  oracle::rng r(107);
  for (int k = 0; k < 20; ++k) {
    std::size_t n = oracle::pick(r, 3, 10);
    auto g = oracle::random_unichain(r, n, 3, 3);
    auto in_E = oracle::cycle_set_with_zero(r, n);
    auto res = policy_iteration(g, in_E, obstacle_costs(g));
    EXPECT_TRUE(res.gains_non_increasing);
    for (std::size_t i = 1; i < res.trace.size(); ++i) EXPECT_LE(res.trace[i].J_max - res.trace[i - 1].J_max, 1e-9 * magnitude(res.gb)) << k << " " << i;
    EXPECT_LE(res.optimality_residual, 1e-6 * std::max(1.0, magnitude(res.gb)));
  }
}

TEST(PolicyIteration, AdversaryOnlyHurts) {
  oracle::rng r(109);
  for (int k = 0; k < 10; ++k) {
    std::size_t n = oracle::pick(r, 3, 8);
    auto g = oracle::random_unichain(r, n, 2, 2);
    auto in_E = oracle::cycle_set_with_zero(r, n);
    auto cost = obstacle_costs(g);
    auto secure = policy_iteration(g, in_E, cost);
    auto mdp = marginalize_adversary(g, uniform_policy(g, player::adversary));
    auto naive = policy_iteration(mdp, in_E, cost);
    auto naive_worst = best_response_cost(g, naive.mu, in_E, cost).gb;
    for (std::size_t s = 0; s < n; ++s) EXPECT_LE(secure.gb.J[s], naive_worst.J[s] + 1e-6);
  }
}
