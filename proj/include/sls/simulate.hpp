#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sls/automata.hpp"
#include "sls/error.hpp"
#include "sls/game.hpp"
#include "sls/ltl.hpp"
#include "sls/parallel.hpp"
#include "sls/product.hpp"

namespace sls {

/// SplitMix64 finalizer; also used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `key` under a master seed; chained for tuple keys.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) { return splitmix64(splitmix64(seed) ^ key); }

using rng = std::mt19937_64;

inline double uniform01(rng& r) { return std::uniform_real_distribution<double>(0.0, 1.0)(r); }

/// Index drawn from a probability vector (inverse transform, last positive
/// entry absorbs rounding).
inline std::size_t sample_index(const std::vector<double>& p, rng& r) {
  double u = uniform01(r), acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

template <class Row>
std::size_t sample_row(const Row& row, rng& r) {
  double u = uniform01(r), acc = 0.0;
  for (const auto& t : row) {
    acc += t.prob;
    if (u < acc) return t.target;
  }
  return row.back().target;
}

/// Wilson score interval for k successes in n trials.
struct interval {
  double low = 0.0, high = 1.0;
};

inline interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {};
  const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct simulation_options {
  std::size_t runs = 1000;
  std::size_t horizon = 100;
  std::uint64_t seed = 1;
  std::size_t keep_trajectories = 0;  // first k runs are recorded
  std::optional<std::size_t> start;   // base start state, default the game's initial state
};

/// How a finite run is turned into a verdict.
enum class scoring {
  lasso,  // labels as prefix, final label repeated as cycle, checked by the formula or the DRA
  gamec   // entered E and never left it afterwards
};

struct simulation_stats {
  std::size_t runs = 0;
  std::size_t horizon = 0;
  std::size_t successes = 0;
  double satisfaction_estimate = 0.0;
  interval satisfaction_ci;
  std::vector<std::size_t> cycles_completed;  // per run
  double total_cycles = 0.0;
  double total_violation_cost = 0.0;
  double violation_cost_per_cycle = 0.0;  // pooled: total cost / total cycles
  double violation_cost_mean = 0.0;       // mean of per-run ratios over runs with a cycle
  double violation_cost_variance = 0.0;
  std::vector<std::vector<std::size_t>> trajectories;  // base states
};

/// What the simulator needs beyond the policies.
struct simulation_spec {
  const product_game* product = nullptr;
  const ltl::formula* formula = nullptr;     // lasso oracle; DRA acceptance when null
  const std::vector<char>* in_E = nullptr;   // for scoring::gamec
  const std::vector<char>* cycle_set = nullptr;  // product states that close a cycle
  const std::vector<double>* cost = nullptr;     // per product state
  scoring mode = scoring::lasso;
};

namespace detail {

struct run_result {
  bool success = false;
  std::size_t cycles = 0;
  double cost = 0.0;
  std::vector<std::size_t> states;
};

// A product state whose induced row is a point mass on itself.
inline bool absorbing(const stochastic_game& g, const std::vector<double>& mu, const std::vector<double>& tau,
                      std::size_t x) {
  for (std::size_t uc = 0; uc < mu.size(); ++uc) {
    if (mu[uc] == 0.0) continue;
    for (std::size_t ua = 0; ua < tau.size(); ++ua) {
      if (tau[ua] == 0.0) continue;
      auto row = g.row(x, uc, ua);
      if (row.size() != 1 || row[0].target != x) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Samples runs of the base game with the controller executing the product
/// policy mu (automaton tracked online) and the adversary playing the product
/// policy tau. Run r uses its own generator seeded from (seed, r). A run stops
/// early once the product state is absorbing under (mu, tau).
inline simulation_stats simulate(const stochastic_game& base, const mixed_policy& mu, const mixed_policy& tau,
                                 const simulation_spec& spec, const simulation_options& opt) {
  if (!spec.product) throw format_error("simulation needs a product game");
  if (opt.runs == 0 || opt.horizon == 0) throw format_error("runs and horizon must be positive");
  if (spec.mode == scoring::gamec && !spec.in_E) throw format_error("gamec scoring needs the accepting set");
  const product_game& p = *spec.product;
  const std::size_t nq = p.num_automaton_states();
  if (mu.dist.size() < base.num_states() * nq || tau.dist.size() < base.num_states() * nq)
    throw format_error("policies must cover the product states");
  if (opt.start && *opt.start >= base.num_states()) throw format_error("start state out of range");

  std::vector<detail::run_result> results(opt.runs);
  parallel_for(opt.runs, [&](std::size_t r) {
    rng gen(derive_seed(opt.seed, r));
    auto exec = lift_policy(p, mu);
    detail::run_result& res = results[r];
    std::vector<std::size_t> states;
    std::size_t s = opt.start.value_or(base.initial());
    const std::vector<double>* dist = &exec.start(s);
    states.push_back(s);
    bool seen_cycle_state = false, entered = false, left = false;
    double pending = 0.0;
    for (std::size_t t = 0;; ++t) {
      const std::size_t x = exec.product_state();
      if (spec.cycle_set && (*spec.cycle_set)[x]) {
        if (seen_cycle_state) {
          ++res.cycles;
          res.cost += pending;
        }
        seen_cycle_state = true;
        pending = 0.0;
      }
      if (spec.in_E) {
        if ((*spec.in_E)[x]) entered = true;
        else if (entered) left = true;
      }
      if (t + 1 >= opt.horizon) break;
      if (detail::absorbing(p.game, *dist, tau.dist[x], x)) break;
      if (spec.cost && seen_cycle_state) pending += (*spec.cost)[x];
      std::size_t uc = sample_index(*dist, gen);
      std::size_t ua = sample_index(tau.dist[x], gen);
      s = sample_row(base.row(s, uc, ua), gen);
      dist = &exec.observe(s);
      states.push_back(s);
    }
    if (spec.mode == scoring::gamec) {
      res.success = entered && !left;
    } else {
      ltl::lasso_word w;
      for (std::size_t i = 0; i + 1 < states.size(); ++i) w.prefix.push_back(base.label_set(states[i]));
      w.cycle.push_back(base.label_set(states.back()));
      res.success = spec.formula ? ltl::evaluate_on_lasso(*spec.formula, w) : accepts_lasso(p.automaton, w);
    }
    if (r < opt.keep_trajectories) res.states = std::move(states);
  });

  simulation_stats st;
  st.runs = opt.runs;
  st.horizon = opt.horizon;
  double sum_ratio = 0.0, sum_sq = 0.0;
  std::size_t with_cycle = 0;
  for (auto& res : results) {
    st.successes += res.success ? 1 : 0;
    st.cycles_completed.push_back(res.cycles);
    st.total_cycles += static_cast<double>(res.cycles);
    st.total_violation_cost += res.cost;
    if (res.cycles > 0) {
      double ratio = res.cost / static_cast<double>(res.cycles);
      sum_ratio += ratio;
      sum_sq += ratio * ratio;
      ++with_cycle;
    }
    if (!res.states.empty()) st.trajectories.push_back(std::move(res.states));
  }
  st.satisfaction_estimate = static_cast<double>(st.successes) / static_cast<double>(st.runs);
  st.satisfaction_ci = wilson_interval(st.successes, st.runs);
  if (st.total_cycles > 0) st.violation_cost_per_cycle = st.total_violation_cost / st.total_cycles;
  if (with_cycle > 0) {
    st.violation_cost_mean = sum_ratio / static_cast<double>(with_cycle);
    st.violation_cost_variance =
        std::max(0.0, sum_sq / static_cast<double>(with_cycle) - st.violation_cost_mean * st.violation_cost_mean);
  }
  return st;
}

}  // namespace sls
