#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "sls/error.hpp"
#include "sls/game.hpp"
#include "sls/gamec.hpp"
#include "sls/graph.hpp"
#include "sls/matrix_game.hpp"
#include "sls/parallel.hpp"
#include "sls/product.hpp"

namespace sls {

namespace detail {

inline std::string fresh_name(std::string base, const std::vector<std::string>& taken) {
  while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += '_';
  return base;
}

}  // namespace detail

/// Adds the absorbing state `dest` and a controller action d (appended last
/// at every state). Action d moves E and dest to dest with probability 1 and
/// is a self-loop everywhere else; all original rows are kept.
inline product_game modify_product(const product_game& p, const gamec_set& gs) {
  if (p.dest != no_state) throw format_error("product game is already modified");
  const stochastic_game& g = p.game;
  const std::size_t n = g.num_states();
  std::vector<std::string> names;
  for (std::size_t s = 0; s < n; ++s) names.push_back(g.state_name(s));
  const std::string dest_name = detail::fresh_name("dest", names);

  game_builder b(g.alphabet());
  std::vector<std::string> d_names(n + 1);
  for (std::size_t s = 0; s < n; ++s) {
    auto actions = g.controller_actions(s);
    d_names[s] = detail::fresh_name("d", actions);
    actions.push_back(d_names[s]);
    b.add_state(g.state_name(s), g.label(s), std::move(actions), g.adversary_actions(s));
  }
  d_names[n] = "d";
  const std::size_t dest = b.add_state(dest_name, 0, {"d"}, {"idle"});
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t d = g.num_controller_actions(s);
    for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua) {
      for (std::size_t uc = 0; uc < d; ++uc)
        for (const auto& t : g.row(s, uc, ua)) b.add(s, uc, ua, t.target, t.prob);
      b.add(s, d, ua, gs.in_E[s] ? dest : s, 1.0);
    }
  }
  b.add(dest, 0, 0, dest, 1.0);
  b.set_initial(g.initial());

  product_game m;
  m.game = std::move(b).build();
  m.automaton = p.automaton;
  m.base_letter = p.base_letter;
  m.num_base_states = p.num_base_states;
  m.pairs = p.pairs;
  for (auto& pair : m.pairs) pair.L.push_back(0), pair.K.push_back(0);
  m.reachable = p.reachable;
  m.reachable.push_back(1);
  m.dest = dest;
  return m;
}

/// Payoff M[u_C][u_A] = sum over s' of Pr(s,u_C,u_A,s') v(s'), restricted to
/// the first `controller_rows` controller actions.
inline Eigen::MatrixXd expected_value_matrix(const stochastic_game& g, std::size_t s, const std::vector<double>& v,
                                             std::size_t controller_rows) {
  const std::size_t na = g.num_adversary_actions(s);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(controller_rows), static_cast<Eigen::Index>(na));
  for (std::size_t uc = 0; uc < controller_rows; ++uc)
    for (std::size_t ua = 0; ua < na; ++ua) {
      double acc = 0.0;
      for (const auto& t : g.row(s, uc, ua)) acc += t.prob * v[t.target];
      m(static_cast<Eigen::Index>(uc), static_cast<Eigen::Index>(ua)) = acc;
    }
  return m;
}

struct vi_options {
  double delta = 1e-6;
  bool epsilon_mode = false;
  double epsilon = 1e-4;
  std::size_t max_iterations = 1'000'000;
};

/// Result of value iteration on a modified product game.
struct value_vector {
  std::vector<double> v;            // indexed like the modified product, dest included
  std::size_t iterations = 0;       // index k of the final iterate v^k
  std::size_t sweeps = 0;           // applications of the update operator
  double residual = 0.0;            // sup-norm change of the final sweep
  double min_increment = 0.0;       // min over k, s of v^{k+1}(s) - v^k(s)
  std::vector<double> first_positive;  // smallest positive value attained per state, 0 if none
  double sweep_bound = 0.0;         // n * max log(1/v0)/log(1+eps) + n, epsilon mode only
  std::vector<double> trace_v0;     // v at the initial state per iterate
};

inline std::vector<char> accepting_with_dest(const product_game& modified, const gamec_set& gs) {
  std::vector<char> e(modified.num_states(), 0);
  for (std::size_t s = 0; s < gs.in_E.size(); ++s) e[s] = gs.in_E[s];
  e[modified.dest] = 1;
  return e;
}

/// Stackelberg value iteration for max-min reachability of `target`:
/// v^0 = 0, v^1 = 1 on the target, then synchronous sweeps
/// v^{k+1}(s) = value of M[u_C][u_A] = sum Pr(s,u_C,u_A,s') v^k(s') off the
/// target. Strict mode stops when the sup-norm change is at most delta;
/// epsilon mode only accepts updates exceeding (1 + eps) v^k(s) and stops
/// when nothing changes.
inline value_vector max_reach_values(const stochastic_game& g, const std::vector<char>& target,
                                     const vi_options& opt = {}) {
  if (!(opt.delta > 0.0)) throw format_error("delta must be positive");
  if (opt.epsilon_mode && !(opt.epsilon > 0.0)) throw format_error("epsilon must be positive");
  const std::size_t n = g.num_states();

  value_vector out;
  std::vector<double> v(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) v[s] = target[s] ? 1.0 : 0.0;
  out.min_increment = 0.0;  // v^1 - v^0 >= 0
  out.first_positive = v;
  out.iterations = 1;
  out.trace_v0 = {0.0, v[g.initial()]};

  std::vector<double> next(n);
  std::vector<char> updated(n, 0);
  for (;;) {
    if (out.sweeps >= opt.max_iterations) {
      if (opt.epsilon_mode) throw iteration_cap("epsilon-mode value iteration hit the iteration cap");
      throw non_convergence("value iteration did not reach delta = " + text::format_double(opt.delta) + " within " +
                            std::to_string(opt.max_iterations) + " sweeps");
    }
    parallel_for(n, [&](std::size_t s) {
      if (target[s]) {
        next[s] = 1.0;
        updated[s] = 0;
        return;
      }
      double tv = solve_zero_sum(expected_value_matrix(g, s, v, g.num_controller_actions(s))).value;
      if (opt.epsilon_mode) {
        updated[s] = tv > (1.0 + opt.epsilon) * v[s];
        next[s] = updated[s] ? tv : v[s];
      } else {
        next[s] = tv;
      }
    });
    ++out.sweeps;
    double change = 0.0;
    bool any_update = false;
    for (std::size_t s = 0; s < n; ++s) {
      double diff = next[s] - v[s];
      out.min_increment = std::min(out.min_increment, diff);
      change = std::max(change, std::abs(diff));
      if (next[s] > 0.0 && (out.first_positive[s] == 0.0 || next[s] < out.first_positive[s]))
        out.first_positive[s] = next[s];
      if (updated[s]) any_update = true;
    }
    v.swap(next);
    ++out.iterations;
    out.trace_v0.push_back(v[g.initial()]);
    out.residual = change;
    if (out.min_increment < -1e-12) throw numerical_failure("value iteration lost monotonicity");
    if (opt.epsilon_mode ? !any_update : change <= opt.delta) break;
  }

  if (opt.epsilon_mode) {
    double worst = 0.0;
    for (double p : out.first_positive)
      if (p > 0.0) worst = std::max(worst, std::log(1.0 / p) / std::log1p(opt.epsilon));
    out.sweep_bound = static_cast<double>(n) * worst + static_cast<double>(n);
    if (static_cast<double>(out.sweeps) > out.sweep_bound)
      throw numerical_failure("epsilon-mode sweeps exceeded the proven bound");
  }
  out.v = std::move(v);
  return out;
}

/// Value iteration on a modified product game with target E and dest.
inline value_vector max_reach_value_iteration(const product_game& modified, const gamec_set& gs,
                                              const vi_options& opt = {}) {
  if (modified.dest == no_state) throw format_error("value iteration needs a modified product game");
  return max_reach_values(modified.game, accepting_with_dest(modified, gs), opt);
}

/// max_s |v(s) - value(M_v(s))|, the fixed-point residual of a value vector.
inline double fixed_point_residual(const product_game& modified, const std::vector<double>& v) {
  const stochastic_game& g = modified.game;
  double worst = 0.0;
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    double tv = solve_zero_sum(expected_value_matrix(g, s, v, g.num_controller_actions(s))).value;
    worst = std::max(worst, std::abs(tv - v[s]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Fixed-policy analysis

/// Probability of ever reaching `target` in the chain, solved exactly with a
/// sparse LU factorization after removing states that cannot reach it.
inline std::vector<double> reach_probability(const markov_chain& chain, const std::vector<char>& target) {
  const std::size_t n = chain.size();
  digraph graph(n);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& e : chain.rows[s]) graph[s].push_back(e.target);
  auto live = can_reach(graph, target);
  std::vector<double> x(n, 0.0);
  std::vector<std::size_t> unknown, local(n, no_state);
  for (std::size_t s = 0; s < n; ++s) {
    if (target[s]) x[s] = 1.0;
    else if (live[s]) local[s] = unknown.size(), unknown.push_back(s);
  }
  if (unknown.empty()) return x;
  const auto m = static_cast<Eigen::Index>(unknown.size());
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < unknown.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    trips.emplace_back(r, r, 1.0);
    for (const auto& e : chain.rows[unknown[i]]) {
      if (target[e.target]) rhs[r] += e.prob;
      else if (local[e.target] != no_state) trips.emplace_back(r, static_cast<Eigen::Index>(local[e.target]), -e.prob);
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw singular_system("reachability system is singular");
  Eigen::VectorXd sol = lu.solve(rhs);
  for (std::size_t i = 0; i < unknown.size(); ++i)
    x[unknown[i]] = std::clamp(sol[static_cast<Eigen::Index>(i)], 0.0, 1.0);
  return x;
}

struct adversary_response {
  mixed_policy tau;
  std::vector<double> value;  // reach probability of the target under (mu, tau)
};

namespace detail {

// Row of the adversary MDP: controller marginalized by mu at s for fixed u_A.
inline std::vector<transition> adversary_row(const stochastic_game& g, const std::vector<double>& mu, std::size_t s,
                                             std::size_t ua, std::vector<double>& scratch,
                                             std::vector<std::size_t>& touched) {
  std::vector<double> point(g.num_adversary_actions(s), 0.0);
  point[ua] = 1.0;
  return induced_row(g, mu, point, s, scratch, touched);
}

}  // namespace detail

/// Adversary best response to a fixed controller policy: minimizes the
/// probability of reaching `target`. States from which the adversary can
/// avoid the target forever get value 0; the remaining values come from
/// value iteration followed by exact policy evaluation and greedy
/// improvement until the deterministic response is stable.
inline adversary_response best_response_adversary(const stochastic_game& g, const mixed_policy& mu,
                                                  const std::vector<char>& target) {
  if (mu.owner != player::controller) throw owner_mismatch("best response needs a controller policy");
  validate_policy(g, mu);
  const std::size_t n = g.num_states();
  std::vector<double> scratch(n, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::vector<std::vector<transition>>> rows(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
      rows[s].push_back(detail::adversary_row(g, mu.dist[s], s, ua, scratch, touched));

  // Greatest set of non-target states the adversary can keep the play in.
  std::vector<char> avoid(n);
  for (std::size_t s = 0; s < n; ++s) avoid[s] = !target[s];
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (!avoid[s]) continue;
      bool keep = false;
      for (const auto& row : rows[s])
        if (std::all_of(row.begin(), row.end(), [&](const transition& t) { return avoid[t.target] != 0; })) {
          keep = true;
          break;
        }
      if (!keep) avoid[s] = 0, changed = true;
    }
  }

  auto q_value = [&](std::size_t s, std::size_t ua, const std::vector<double>& x) {
    double acc = 0.0;
    for (const auto& t : rows[s][ua]) acc += t.prob * x[t.target];
    return acc;
  };

  std::vector<double> x(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) x[s] = target[s] ? 1.0 : 0.0;
  for (std::size_t sweep = 0; sweep < 100000; ++sweep) {
    double change = 0.0;
    std::vector<double> nx(x);
    for (std::size_t s = 0; s < n; ++s) {
      if (target[s] || avoid[s]) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t ua = 0; ua < rows[s].size(); ++ua) best = std::min(best, q_value(s, ua, x));
      nx[s] = best;
      change = std::max(change, std::abs(best - x[s]));
    }
    x.swap(nx);
    if (change <= 1e-12) break;
  }

  std::vector<std::size_t> choice(n, 0);
  auto greedy = [&](std::size_t s, const std::vector<double>& val, std::size_t current) {
    std::size_t best = current;
    double best_q = q_value(s, current, val);
    for (std::size_t ua = 0; ua < rows[s].size(); ++ua) {
      double qv = q_value(s, ua, val);
      if (qv < best_q - 1e-12) best_q = qv, best = ua;
    }
    return best;
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (avoid[s]) {
      for (std::size_t ua = 0; ua < rows[s].size(); ++ua)
        if (std::all_of(rows[s][ua].begin(), rows[s][ua].end(),
                        [&](const transition& t) { return avoid[t.target] != 0; })) {
          choice[s] = ua;
          break;
        }
    } else if (!target[s]) {
      std::size_t best = 0;
      double best_q = q_value(s, 0, x);
      for (std::size_t ua = 1; ua < rows[s].size(); ++ua) {
        double qv = q_value(s, ua, x);
        if (qv < best_q - 1e-12) best_q = qv, best = ua;
      }
      choice[s] = best;
    }
  }

  adversary_response out;
  for (int round = 0; round < 1000; ++round) {
    out.tau = pure_policy(g, player::adversary, choice);
    markov_chain chain;
    chain.rows.resize(n);
    for (std::size_t s = 0; s < n; ++s) chain.rows[s] = rows[s][choice[s]];
    out.value = reach_probability(chain, target);
    bool stable = true;
    for (std::size_t s = 0; s < n; ++s) {
      if (target[s] || avoid[s]) continue;
      std::size_t b = greedy(s, out.value, choice[s]);
      if (b != choice[s]) choice[s] = b, stable = false;
    }
    if (stable) break;
  }
  return out;
}

/// Reach probability of `target` under (mu, tau).
inline std::vector<double> evaluate_reach(const stochastic_game& g, const mixed_policy& mu, const mixed_policy& tau,
                                          const std::vector<char>& target) {
  return reach_probability(induced_chain(g, mu, tau), target);
}

// ---------------------------------------------------------------------------
// Policy extraction

struct extract_options {
  /// After the matrix-game extraction, switch states whose matrix game on
  /// the policy's own worst-case values strictly beats that value (repairs
  /// stalls on value ties); 0 disables.
  std::size_t repair_rounds = 100;
};

/// Controller policy for max-min reachability of `target` given values v:
/// the row strategy of the matrix game on v at every non-target state
/// (uniform on the target).
inline mixed_policy secure_reach_policy(const stochastic_game& g, const std::vector<char>& target,
                                        const std::vector<double>& v, const extract_options& opt = {}) {
  const std::size_t n = g.num_states();
  mixed_policy mu = uniform_policy(g, player::controller);
  parallel_for(n, [&](std::size_t s) {
    if (!target[s]) mu.dist[s] = solve_zero_sum(expected_value_matrix(g, s, v, g.num_controller_actions(s))).row_strategy;
  });
  for (std::size_t round = 0; round < opt.repair_rounds; ++round) {
    auto worst = best_response_adversary(g, mu, target).value;
    bool changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (target[s] || v[s] <= worst[s] + 1e-9) continue;
      auto sol = solve_zero_sum(expected_value_matrix(g, s, worst, g.num_controller_actions(s)));
      if (sol.value > worst[s] + 1e-9) {
        mu.dist[s] = sol.row_strategy;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return mu;
}

inline void set_uniform_inside_gamecs(const stochastic_game& g, const gamec_set& gs, mixed_policy& mu) {
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    if (!gs.in_E[s]) continue;
    mu.dist[s].assign(g.num_controller_actions(s), 0.0);
    const auto& en = gs.components[gs.component_of[s]].enabled_at(s);
    for (std::size_t uc : en) mu.dist[s][uc] = 1.0 / static_cast<double>(en.size());
  }
}

/// Controller policy on the unmodified product: outside E the row strategy
/// of the matrix game on the converged values (action d excluded), inside E
/// uniform over the component's enabled actions.
inline mixed_policy extract_policy(const product_game& product, const gamec_set& gs, const value_vector& vv,
                                   const extract_options& opt = {}) {
  std::vector<double> v(vv.v.begin(), vv.v.begin() + static_cast<std::ptrdiff_t>(product.num_states()));
  mixed_policy mu = secure_reach_policy(product.game, gs.in_E, v, opt);
  set_uniform_inside_gamecs(product.game, gs, mu);
  return mu;
}

/// Adversary-oblivious baseline: the adversary is replaced by a uniform
/// distribution, the resulting MDP is solved for maximal reachability of E,
/// and each state picks, among value-optimal actions, one minimizing the
/// expected number of steps until the play settles. Inside E it matches the
/// secure policy's uniform distribution over enabled actions.
inline mixed_policy oblivious_policy(const product_game& product, const gamec_set& gs, double tolerance = 1e-9) {
  const stochastic_game& g = product.game;
  const std::size_t n = g.num_states();
  std::vector<double> scratch(n, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::vector<std::vector<transition>>> rows(n);
  for (std::size_t s = 0; s < n; ++s) {
    auto uniform = std::vector<double>(g.num_adversary_actions(s), 1.0 / static_cast<double>(g.num_adversary_actions(s)));
    for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc) {
      std::vector<double> point(g.num_controller_actions(s), 0.0);
      point[uc] = 1.0;
      rows[s].push_back(induced_row(g, point, uniform, s, scratch, touched));
    }
  }
  auto q_value = [&](std::size_t s, std::size_t uc, const std::vector<double>& x) {
    double acc = 0.0;
    for (const auto& t : rows[s][uc]) acc += t.prob * x[t.target];
    return acc;
  };
  std::vector<double> x(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) x[s] = gs.in_E[s] ? 1.0 : 0.0;
  for (std::size_t sweep = 0; sweep < 1'000'000; ++sweep) {
    double change = 0.0;
    std::vector<double> nx(x);
    for (std::size_t s = 0; s < n; ++s) {
      if (gs.in_E[s]) continue;
      double best = 0.0;
      for (std::size_t uc = 0; uc < rows[s].size(); ++uc) best = std::max(best, q_value(s, uc, x));
      nx[s] = best;
      change = std::max(change, best - x[s]);
    }
    x.swap(nx);
    if (change <= 1e-13) break;
  }

  // Among value-optimal actions, minimize the expected number of steps until
  // E or a zero-value state is hit (value iteration from 0 on unit costs).
  std::vector<std::vector<std::size_t>> optimal(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (gs.in_E[s] || x[s] <= 0.0) continue;
    for (std::size_t uc = 0; uc < rows[s].size(); ++uc)
      if (q_value(s, uc, x) >= x[s] - tolerance) optimal[s].push_back(uc);
  }
  std::vector<double> steps(n, 0.0);
  auto step_value = [&](std::size_t s, std::size_t uc, const std::vector<double>& t) {
    double acc = 1.0;
    for (const auto& e : rows[s][uc]) acc += e.prob * t[e.target];
    return acc;
  };
  for (std::size_t sweep = 0; sweep < 100'000; ++sweep) {
    double change = 0.0;
    std::vector<double> next(steps);
    for (std::size_t s = 0; s < n; ++s) {
      if (optimal[s].empty()) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t uc : optimal[s]) best = std::min(best, step_value(s, uc, steps));
      next[s] = best;
      change = std::max(change, std::abs(best - steps[s]) / std::max(1.0, best));
    }
    steps.swap(next);
    if (change <= 1e-10) break;
  }
  mixed_policy mu{player::controller, std::vector<std::vector<double>>(n)};
  for (std::size_t s = 0; s < n; ++s) {
    mu.dist[s].assign(g.num_controller_actions(s), 0.0);
    if (gs.in_E[s]) continue;
    std::size_t best = 0;
    if (!optimal[s].empty()) {
      best = optimal[s][0];
      double best_t = step_value(s, best, steps);
      for (std::size_t uc : optimal[s]) {
        double t = step_value(s, uc, steps);
        if (t < best_t - 1e-9 * std::max(1.0, best_t)) best_t = t, best = uc;
      }
    }
    mu.dist[s][best] = 1.0;
  }
  set_uniform_inside_gamecs(g, gs, mu);
  return mu;
}

}  // namespace sls
