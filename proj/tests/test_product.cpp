#include <random>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sls;

namespace {

const char* eventually_a = R"(dra v1
alphabet a
states q0 q1
initial q0
edges
q0 !a q0
q0 a q1
q1 true q1
pairs
1 L:{} K:{q1}
)";

const char* three_state = R"(dra v1
alphabet a
states x y z
initial x
edges
x a y
x !a x
y a z
y !a x
z true z
pairs
1 L:{x} K:{z}
)";

/// Random game over {a} whose initial state is unlabeled.
stochastic_game game_with_unlabeled_start(oracle::rng& r, std::size_t n) {
  for (;;) {
    oracle::game_shape shape;
    shape.states = n;
    shape.label_prob = 0.25;
    auto g = oracle::random_game(r, shape);
    if (g.label(0) == 0) return g;
  }
}

mixed_policy random_policy(oracle::rng& r, const stochastic_game& g, player owner) {
  mixed_policy mu{owner, {}};
  for (std::size_t s = 0; s < g.num_states(); ++s) mu.dist.push_back(oracle::random_distribution(r, num_actions(g, owner, s)));
  return mu;
}

/// Copies a base policy to every automaton copy of a state.
mixed_policy lift_stationary(const product_game& p, const mixed_policy& mu) {
  mixed_policy out{mu.owner, {}};
  for (std::size_t x = 0; x < p.num_states(); ++x) out.dist.push_back(mu.dist[p.base_state(x)]);
  return out;
}

}  // namespace

TEST(Product, Cardinality) {
  oracle::rng r(1);
  oracle::game_shape shape;
  shape.states = 4;
  auto p = build_product(oracle::random_game(r, shape), parse_dra(three_state));
  EXPECT_EQ(p.num_states(), 12u);
  EXPECT_EQ(p.game.state_name(p.index(2, 1)), "s2|y");
  EXPECT_EQ(p.base_state(p.index(3, 2)), 3u);
  EXPECT_EQ(p.automaton_state(p.index(3, 2)), 2u);
}

TEST(Product, CopiesBaseProbabilities) {
  oracle::rng r(2);
  auto d = parse_dra(three_state);
  for (int k = 0; k < 20; ++k) {
    oracle::game_shape shape;
    shape.states = 3;
    auto g = oracle::random_game(r, shape);
    auto p = build_product(g, d);
    for (std::size_t s = 0; s < g.num_states(); ++s)
      for (std::size_t q = 0; q < d.num_states(); ++q)
        for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
          for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua) {
            auto base = g.row(s, uc, ua);
            auto prod = p.game.row(p.index(s, q), uc, ua);
            ASSERT_EQ(base.size(), prod.size());
            double sum = 0.0;
            for (std::size_t i = 0; i < base.size(); ++i) {
              std::size_t t = base[i].target;
              EXPECT_EQ(prod[i].target, p.index(t, d.next(q, p.base_letter[t])));
              EXPECT_EQ(prod[i].prob, base[i].prob);
              sum += prod[i].prob;
            }
            EXPECT_NEAR(sum, 1.0, 1e-9);
          }
  }
}

TEST(Product, InitialStateConsumesFirstLabel) {
  game_builder b({"a"});
  b.add_state("s", 1, {"c"}, {"a"});
  b.add(0, 0, 0, 0, 1.0);
  auto p = build_product(std::move(b).build(), parse_dra(eventually_a));
  EXPECT_EQ(p.game.state_name(p.game.initial()), "s|q1");
  EXPECT_TRUE(p.pairs[0].K[p.game.initial()]);
}

TEST(Product, AlphabetMismatch) {
  game_builder b({"b"});
  b.add_state("s", 0, {"c"}, {"a"});
  b.add(0, 0, 0, 0, 1.0);
  EXPECT_THROW(build_product(std::move(b).build(), parse_dra(eventually_a)), alphabet_mismatch);
}

TEST(Product, ReachingAcceptanceMatchesLassoMonteCarlo) {
  oracle::rng r(3);
  auto d = parse_dra(eventually_a);
  auto f = ltl::parse_ltl("F a");
  for (int k = 0; k < 3; ++k) {
    auto g = game_with_unlabeled_start(r, 5);
    auto mu = random_policy(r, g, player::controller);
    auto tau = random_policy(r, g, player::adversary);
    auto p = build_product(g, d);
    auto exact = reach_probability(induced_chain(p.game, lift_stationary(p, mu), lift_stationary(p, tau)),
                                   p.pairs[0].K)[p.game.initial()];

    auto chain = induced_chain(g, mu, tau);
    const int runs = 10000, horizon = 200;
    int accepted = 0;
    for (int run = 0; run < runs; ++run) {
      ltl::lasso_word w;
      std::size_t s = g.initial();
      for (int t = 0; t < horizon; ++t) {
        w.prefix.push_back(g.label_set(s));
        s = sample_row(chain.rows[s], r);
      }
      w.cycle.push_back(w.prefix.back());
      accepted += ltl::evaluate_on_lasso(f, w);
    }
    EXPECT_NEAR(static_cast<double>(accepted) / runs, exact, 0.02);
  }
}

TEST(Executor, SingleStateAutomatonReproducesPolicy) {
  auto d = parse_dra("dra v1\nalphabet a\nstates q\ninitial q\nedges\nq true q\npairs\n1 L:{} K:{q}\n");
  oracle::rng r(4);
  auto g = oracle::random_game(r, {});
  auto mu = random_policy(r, g, player::controller);
  auto p = build_product(g, d);
  auto exec = lift_policy(p, mu);
  for (std::size_t s = 0; s < g.num_states(); ++s) EXPECT_EQ(exec.start(s), mu.dist[s]);
}

TEST(Executor, TracksAutomatonState) {
  game_builder b({"a"});
  b.add_state("u", 0, {"c"}, {"a"});
  b.add_state("v", 1, {"c"}, {"a"});
  b.add(0, 0, 0, 1, 1.0);
  b.add(1, 0, 0, 0, 1.0);
  auto g = std::move(b).build();
  auto p = build_product(g, parse_dra(three_state));
  auto exec = lift_policy(p, uniform_policy(p.game, player::controller));
  exec.start(0);
  EXPECT_EQ(exec.automaton_state(), 0u);
  exec.observe(1);
  EXPECT_EQ(exec.automaton_state(), 1u);
  exec.observe(1);
  EXPECT_EQ(exec.automaton_state(), 2u);
  EXPECT_EQ(exec.product_state(), p.index(1, 2));
}

TEST(Executor, SimulationMatchesProductProbability) {
  oracle::rng r(5);
  auto d = parse_dra(eventually_a);
  auto f = ltl::parse_ltl("F a");
  auto g = game_with_unlabeled_start(r, 6);
  auto p = build_product(g, d);
  auto mu = random_policy(r, p.game, player::controller);
  auto tau = random_policy(r, p.game, player::adversary);
  auto exact = reach_probability(induced_chain(p.game, mu, tau), p.pairs[0].K)[p.game.initial()];

  simulation_spec spec;
  spec.product = &p;
  spec.formula = &f;
  spec.mode = scoring::lasso;
  simulation_options opt;
  opt.runs = 10000;
  opt.horizon = 200;
  opt.seed = 99;
  auto st = simulate(g, mu, tau, spec, opt);
  EXPECT_NEAR(st.satisfaction_estimate, exact, 0.02);
}
