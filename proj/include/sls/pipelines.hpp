#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sls/acpc.hpp"
#include "sls/automata.hpp"
#include "sls/gamec.hpp"
#include "sls/game.hpp"
#include "sls/gridworld.hpp"
#include "sls/ltl.hpp"
#include "sls/product.hpp"
#include "sls/reachability.hpp"
#include "sls/simulate.hpp"
#include "sls/text.hpp"

/// End-to-end synthesis, comparison and simulation runs shared by the CLI
/// and the tests. Every run returns its output files as strings.
namespace sls {

// ---------------------------------------------------------------------------
// Problem 1: maximal worst-case satisfaction probability

struct max_prob_result {
  stochastic_game base;
  product_game product;
  product_game modified;
  gamec_set gamecs;
  value_vector values;
  mixed_policy policy;  // on the unmodified product
  std::vector<policy_phase> phases;
  bool unsatisfiable = false;  // no GAMEC at all
};

inline max_prob_result synthesize_max_prob(const stochastic_game& g, const dra& d, const vi_options& vi = {},
                                           const extract_options& ex = {}) {
  max_prob_result r;
  r.base = g;
  r.product = build_product(g, d);
  r.gamecs = compute_gamecs(r.product);
  r.unsatisfiable = r.gamecs.components.empty();
  r.modified = modify_product(r.product, r.gamecs);
  r.values = max_reach_value_iteration(r.modified, r.gamecs, vi);
  r.policy = extract_policy(r.product, r.gamecs, r.values, ex);
  r.phases.assign(r.product.num_states(), policy_phase::reach);
  for (std::size_t s = 0; s < r.product.num_states(); ++s)
    if (r.gamecs.in_E[s]) r.phases[s] = policy_phase::cycle;
  return r;
}

// ---------------------------------------------------------------------------
// Problem 3: minimal violation cost per cycle inside the accepting components

struct component_solution {
  restricted_game local;
  std::vector<char> cycle_set;  // local: K(z) states of the component's pair
  cost_assignment cost;         // local
  policy_iteration_result pi;
  double J = 0.0;  // max over the component's states
};

struct min_violation_result {
  max_prob_result reach;
  cost_assignment cost;         // on the product
  std::vector<char> cycle_set;  // on the product
  std::vector<component_solution> components;
  std::size_t best = no_state;  // component with the lowest J
  mixed_policy mu_cycle;
  mixed_policy policy;  // mu*
};

/// Local view of component h with its cycle set and costs.
inline component_solution prepare_component(const product_game& p, const gamec_set& gs, std::size_t h,
                                            const cost_assignment& cost) {
  component_solution c;
  const gamec& comp = gs.components[h];
  c.local = restrict_to_component(p.game, comp);
  c.cycle_set.assign(comp.states.size(), 0);
  c.cost.alpha = cost.alpha;
  c.cost.g.resize(comp.states.size());
  for (std::size_t i = 0; i < comp.states.size(); ++i) {
    c.cycle_set[i] = p.pairs[comp.pair].K[comp.states[i]];
    c.cost.g[i] = cost.g[comp.states[i]];
  }
  return c;
}

/// Writes a local policy of a component into a product-wide policy.
inline void embed_policy(const restricted_game& local, const mixed_policy& mu_local, const stochastic_game& g,
                         mixed_policy& out) {
  for (std::size_t i = 0; i < local.states.size(); ++i) {
    std::size_t s = local.states[i];
    out.dist[s].assign(g.num_controller_actions(s), 0.0);
    for (std::size_t k = 0; k < local.actions[i].size(); ++k) out.dist[s][local.actions[i][k]] = mu_local.dist[i][k];
  }
}

/// Local view of a product policy on a component; empty when the policy puts
/// mass on actions outside the component.
inline std::optional<mixed_policy> restrict_policy(const restricted_game& local, const mixed_policy& mu) {
  mixed_policy out{mu.owner, std::vector<std::vector<double>>(local.states.size())};
  for (std::size_t i = 0; i < local.states.size(); ++i) {
    double mass = 0.0;
    for (std::size_t a : local.actions[i]) {
      out.dist[i].push_back(mu.dist[local.states[i]][a]);
      mass += out.dist[i].back();
    }
    if (mass < 1.0 - row_sum_tolerance) return std::nullopt;
  }
  return out;
}

/// Replaces tau inside every component the controller policy stays in by the
/// cost-maximizing proper response; other states keep their tau.
inline mixed_policy cost_adversary(const product_game& p, const gamec_set& gs, const mixed_policy& mu,
                                   const cost_assignment& cost, mixed_policy tau) {
  for (std::size_t h = 0; h < gs.components.size(); ++h) {
    component_solution c = prepare_component(p, gs, h, cost);
    auto mu_local = restrict_policy(c.local, mu);
    if (!mu_local) continue;
    try {
      auto br = best_response_cost(c.local.game, *mu_local, c.cycle_set, c.cost);
      for (std::size_t i = 0; i < c.local.states.size(); ++i) tau.dist[c.local.states[i]] = br.tau.dist[i];
    } catch (const improper_policy&) {
    }
  }
  return tau;
}

inline double max_gain(const gain_bias& gb) { return *std::max_element(gb.J.begin(), gb.J.end()); }

inline min_violation_result synthesize_min_violation(const stochastic_game& g, const dra& d, const ltl::formula& psi,
                                                     double alpha, const vi_options& vi = {},
                                                     const policy_iteration_options& pio = {}) {
  min_violation_result r;
  r.reach = synthesize_max_prob(g, d, vi);
  const product_game& p = r.reach.product;
  const gamec_set& gs = r.reach.gamecs;
  r.cost = assign_costs(p.game, psi, alpha);
  r.cycle_set.assign(p.num_states(), 0);
  r.components.resize(gs.components.size());
  parallel_for(gs.components.size(), [&](std::size_t h) {
    component_solution c = prepare_component(p, gs, h, r.cost);
    c.pi = policy_iteration(c.local.game, c.cycle_set, c.cost, std::nullopt, pio);
    c.J = max_gain(c.pi.gb);
    r.components[h] = std::move(c);
  });
  r.mu_cycle = r.reach.policy;
  for (std::size_t h = 0; h < r.components.size(); ++h) {
    const auto& c = r.components[h];
    embed_policy(c.local, c.pi.mu, p.game, r.mu_cycle);
    for (std::size_t i = 0; i < c.local.states.size(); ++i) r.cycle_set[c.local.states[i]] = c.cycle_set[i];
    if (r.best == no_state || c.J < r.components[r.best].J) r.best = h;
  }
  r.policy = combine_policies(r.reach.policy, r.mu_cycle, gs.in_E);
  return r;
}

/// Gain of a fixed local controller policy against the cost-maximizing
/// proper adversary.
inline gain_bias worst_case_gain(const component_solution& c, const mixed_policy& mu_local) {
  return best_response_cost(c.local.game, mu_local, c.cycle_set, c.cost).gb;
}

/// Adversary-oblivious cycle policy: policy iteration on the component with
/// the adversary replaced by its uniform distribution.
inline mixed_policy oblivious_cycle_policy(const component_solution& c) {
  auto mdp = marginalize_adversary(c.local.game, uniform_policy(c.local.game, player::adversary));
  return policy_iteration(mdp, c.cycle_set, c.cost).mu;
}

// ---------------------------------------------------------------------------
// Comparisons

struct reach_comparison_row {
  std::size_t start = 0;     // base state
  std::size_t product = 0;   // product state the run starts in
  double secure = 0.0, baseline = 0.0;
  std::optional<simulation_stats> secure_sim, baseline_sim;
};

/// Improvement in percent relative to the baseline; infinite when the
/// baseline is 0 and the secure value is not.
inline double improvement_percent(double secure, double baseline) {
  if (baseline == 0.0) return secure == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (secure - baseline) / baseline * 100.0;
}

/// Product state in which a run of the base game from s starts.
inline std::size_t start_product_state(const product_game& p, std::size_t s) {
  return p.index(s, p.automaton.next(p.automaton.initial(), p.base_letter[s]));
}

/// Evaluates both controller policies against their best-response
/// adversaries at each start state, optionally with simulation estimates.
inline std::vector<reach_comparison_row> compare_reach(const max_prob_result& r, const mixed_policy& secure,
                                                       const mixed_policy& baseline,
                                                       const std::vector<std::size_t>& starts,
                                                       const simulation_options* sim = nullptr,
                                                       scoring mode = scoring::gamec) {
  const stochastic_game& pg = r.product.game;
  auto br_secure = best_response_adversary(pg, secure, r.gamecs.in_E);
  auto br_base = best_response_adversary(pg, baseline, r.gamecs.in_E);
  std::vector<reach_comparison_row> rows;
  for (std::size_t s : starts) {
    reach_comparison_row row;
    row.start = s;
    row.product = start_product_state(r.product, s);
    row.secure = br_secure.value[row.product];
    row.baseline = br_base.value[row.product];
    if (sim) {
      simulation_spec spec;
      spec.product = &r.product;
      spec.in_E = &r.gamecs.in_E;
      spec.mode = mode;
      simulation_options o = *sim;
      o.start = s;
      row.secure_sim = simulate(r.base, secure, br_secure.tau, spec, o);
      row.baseline_sim = simulate(r.base, baseline, br_base.tau, spec, o);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sls
