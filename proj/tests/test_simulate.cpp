#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sls;

namespace {

const std::string samples = SLS_SAMPLES_DIR;

max_prob_result evasion() {
  return synthesize_max_prob(load_game(samples + "/evasion.sg"), load_dra(samples + "/reach_goal.dra"));
}

simulation_spec gamec_spec(const max_prob_result& r) {
  simulation_spec spec;
  spec.product = &r.product;
  spec.in_E = &r.gamecs.in_E;
  spec.mode = scoring::gamec;
  return spec;
}

}  // namespace

TEST(Simulate, OptimalEvasionSucceeds) {
  auto r = evasion();
  auto br = best_response_adversary(r.product.game, r.policy, r.gamecs.in_E);
  simulation_options opt;
  opt.runs = 1000;
  opt.horizon = 100;
  auto st = simulate(r.base, r.policy, br.tau, gamec_spec(r), opt);
  EXPECT_GE(st.satisfaction_estimate, 0.99);

  auto f = ltl::parse_ltl("F goal");
  auto spec = gamec_spec(r);
  spec.mode = scoring::lasso;
  spec.formula = &f;
  EXPECT_GE(simulate(r.base, r.policy, br.tau, spec, opt).satisfaction_estimate, 0.99);
}

TEST(Simulate, PureEvasionIsCaught) {
  auto r = evasion();
  const auto& pg = r.product.game;
  auto mu = pure_policy(pg, player::controller, std::vector<std::size_t>(pg.num_states(), 0));
  auto br = best_response_adversary(pg, mu, r.gamecs.in_E);
  simulation_options opt;
  opt.runs = 1000;
  opt.horizon = 100;
  EXPECT_LE(simulate(r.base, mu, br.tau, gamec_spec(r), opt).satisfaction_estimate, 0.01);
}

TEST(Simulate, LongerHorizonsDoNotHurtAbsorbingSuccess) {
  auto r = evasion();
  auto tau = uniform_policy(r.product.game, player::adversary);
  double prev = 0.0;
  for (std::size_t h : {2u, 4u, 8u, 32u}) {
    simulation_options opt;
    opt.runs = 2000;
    opt.horizon = h;
    double est = simulate(r.base, r.policy, tau, gamec_spec(r), opt).satisfaction_estimate;
    EXPECT_GE(est, prev - 0.03);
    prev = est;
  }
  EXPECT_GE(prev, 0.99);
}

TEST(Simulate, SameSeedSameStats) {
  auto r = evasion();
  auto tau = uniform_policy(r.product.game, player::adversary);
  simulation_options opt;
  opt.runs = 1000;
  opt.keep_trajectories = 5;
  opt.seed = 42;
  auto a = simulate(r.base, r.policy, tau, gamec_spec(r), opt);
  auto b = simulate(r.base, r.policy, tau, gamec_spec(r), opt);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.cycles_completed, b.cycles_completed);
  EXPECT_EQ(a.trajectories, b.trajectories);
  EXPECT_EQ(a.trajectories.size(), 5u);
}

TEST(Simulate, TwoStateCycleCostsAlphaPerCycle) {
  game_builder b({"home", "obstacle"});
  b.add_state("e", 1, {"go"}, {"idle"});
  b.add_state("v", 2, {"go"}, {"idle"});
  b.add(0, 0, 0, 1, 1.0);
  b.add(1, 0, 0, 0, 1.0);
  auto g = std::move(b).build();
  auto d = parse_dra(
      "dra v1\nalphabet home obstacle\nstates q0 q1\ninitial q0\nedges\nq0 home q1\nq0 !home q0\nq1 home q1\n"
      "q1 !home q0\npairs\n1 L:{} K:{q1}\n");
  auto p = build_product(g, d);
  auto gs = compute_gamecs(p);
  auto cost = assign_costs(p.game, ltl::parse_ltl("G !obstacle"), 20.0);
  std::vector<char> cycle_set = p.pairs[0].K;
  simulation_spec spec;
  spec.product = &p;
  spec.in_E = &gs.in_E;
  spec.cycle_set = &cycle_set;
  spec.cost = &cost.g;
  spec.mode = scoring::gamec;
  simulation_options opt;
  opt.runs = 10;
  opt.horizon = 10000;
  auto mu = uniform_policy(p.game, player::controller);
  auto st = simulate(g, mu, uniform_policy(p.game, player::adversary), spec, opt);
  EXPECT_NEAR(st.violation_cost_per_cycle, 20.0, 1.0);
  EXPECT_EQ(st.satisfaction_estimate, 1.0);

  auto in_E = std::vector<char>(p.num_states(), 0);
  for (std::size_t x = 0; x < p.num_states(); ++x) in_E[x] = cycle_set[x];
  auto gb = evaluate_gain_bias(p.game, mu, uniform_policy(p.game, player::adversary), in_E, cost);
  EXPECT_NEAR(gb.J[p.game.initial()], st.violation_cost_per_cycle, 1.0);
}

TEST(Simulate, RejectsBadOptions) {
  auto r = evasion();
  auto tau = uniform_policy(r.product.game, player::adversary);
  simulation_options opt;
  opt.runs = 0;
  EXPECT_THROW(simulate(r.base, r.policy, tau, gamec_spec(r), opt), format_error);
  simulation_spec spec;
  EXPECT_THROW(simulate(r.base, r.policy, tau, spec, {}), format_error);
}

TEST(Wilson, CoversTheEstimate) {
  auto i = wilson_interval(0, 10);
  EXPECT_EQ(i.low, 0.0);
  EXPECT_GT(i.high, 0.0);
  auto j = wilson_interval(500, 1000);
  EXPECT_LT(j.low, 0.5);
  EXPECT_GT(j.high, 0.5);
  EXPECT_NEAR(j.high - j.low, 2 * 1.96 * std::sqrt(0.25 / 1000), 1e-3);
}

TEST(Seeds, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}
