#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "sls/error.hpp"
#include "sls/game.hpp"
#include "sls/graph.hpp"
#include "sls/ltl.hpp"
#include "sls/matrix_game.hpp"
#include "sls/parallel.hpp"
#include "sls/reachability.hpp"
#include "sls/text.hpp"

/// Average cost per cycle under an adversary: gain-bias evaluation, the
/// T* / T_mu operators and policy iteration on a closed sub-game.
namespace sls {

/// Per-state transition cost: alpha where the invariant body fails, else 0.
struct cost_assignment {
  double alpha = 0.0;
  std::vector<double> g;
};

/// psi must be G(propositional formula).
inline cost_assignment assign_costs(const stochastic_game& game, const ltl::formula& psi, double alpha) {
  if (psi.kind() != ltl::op::always || !ltl::is_propositional(psi.lhs()))
    throw not_invariant_form("expected G(propositional formula), got " + ltl::to_string(psi));
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw format_error("violation cost alpha must be positive");
  std::set<std::string> atoms;
  ltl::collect_atoms(psi, atoms);
  for (const auto& a : atoms)
    if (std::find(game.alphabet().begin(), game.alphabet().end(), a) == game.alphabet().end())
      throw unknown_proposition("'" + a + "' is not in the game alphabet");
  cost_assignment c{alpha, std::vector<double>(game.num_states(), 0.0)};
  for (std::size_t s = 0; s < game.num_states(); ++s)
    if (!ltl::holds(psi.lhs(), game.label_set(s))) c.g[s] = alpha;
  return c;
}

/// Solution (J, h, v) of the three gain-bias identities
///   J = P J,   J + h = g + P h + P_out J,   P v = (I - P_out) h + v
/// with v pinned to 0 at one anchor state per recurrent class.
struct gain_bias {
  std::vector<double> J, h, v_aux;
  std::vector<std::size_t> anchors;
  std::vector<std::vector<std::size_t>> recurrent_classes;
  double residual = 0.0;  // sup-norm over all three identities
};

/// Largest magnitude among J and h, at least 1; residual checks scale with it.
inline double magnitude(const gain_bias& gb) {
  double m = 1.0;
  for (std::size_t s = 0; s < gb.J.size(); ++s) m = std::max({m, std::abs(gb.J[s]), std::abs(gb.h[s])});
  return m;
}

namespace detail {

inline digraph chain_graph(const markov_chain& p) {
  digraph g(p.size());
  for (std::size_t s = 0; s < p.size(); ++s)
    for (const auto& e : p.rows[s]) g[s].push_back(e.target);
  return g;
}

}  // namespace detail

/// True iff every state reaches E with positive probability.
inline bool is_proper(const markov_chain& p, const std::vector<char>& in_E) {
  auto reach = can_reach(detail::chain_graph(p), in_E);
  return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

/// Closed communicating classes of the chain, ordered by smallest state.
inline std::vector<std::vector<std::size_t>> recurrent_classes(const markov_chain& p) {
  auto sccs = strongly_connected_components(detail::chain_graph(p));
  std::vector<std::size_t> comp(p.size());
  for (std::size_t c = 0; c < sccs.size(); ++c)
    for (std::size_t s : sccs[c]) comp[s] = c;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    bool closed = true;
    for (std::size_t s : sccs[c])
      for (const auto& e : p.rows[s])
        if (comp[e.target] != c) closed = false;
    if (closed) out.push_back(sccs[c]);
  }
  return out;
}

/// Stationary distribution of a closed class, in the order of `cls`.
inline Eigen::VectorXd stationary_distribution(const markov_chain& p, const std::vector<std::size_t>& cls) {
  const auto m = static_cast<Eigen::Index>(cls.size());
  std::vector<std::size_t> local(p.size(), no_state);
  for (std::size_t i = 0; i < cls.size(); ++i) local[cls[i]] = i;
  // Rows of (I - P)^T, the last one replaced by sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (col != m - 1) trips.emplace_back(col, col, 1.0);
    for (const auto& e : p.rows[cls[i]]) {
      const auto row = static_cast<Eigen::Index>(local[e.target]);
      if (row != m - 1) trips.emplace_back(row, col, -e.prob);
    }
    trips.emplace_back(m - 1, col, 1.0);
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw singular_system("stationary distribution could not be computed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[m - 1] = 1.0;
  return lu.solve(rhs);
}

/// Anchor of a recurrent class: its state of largest stationary probability
/// (smallest index on ties).
inline std::size_t anchor_state(const markov_chain& p, const std::vector<std::size_t>& cls) {
  if (cls.size() == 1) return cls.front();
  Eigen::VectorXd pi = stationary_distribution(p, cls);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < pi.size(); ++i)
    if (pi[i] > pi[best] * (1.0 + 1e-12)) best = i;
  return cls[static_cast<std::size_t>(best)];
}

/// Sup-norm residuals of the three identities, in order.
inline std::array<double, 3> gain_bias_residuals(const markov_chain& p, const std::vector<char>& in_E,
                                                 const std::vector<double>& g, const gain_bias& gb) {
  std::array<double, 3> r{0.0, 0.0, 0.0};
  for (std::size_t s = 0; s < p.size(); ++s) {
    double pj = 0, ph = 0, pout_j = 0, pout_h = 0, pv = 0;
    for (const auto& e : p.rows[s]) {
      pj += e.prob * gb.J[e.target];
      ph += e.prob * gb.h[e.target];
      pv += e.prob * gb.v_aux[e.target];
      if (!in_E[e.target]) pout_j += e.prob * gb.J[e.target], pout_h += e.prob * gb.h[e.target];
    }
    r[0] = std::max(r[0], std::abs(gb.J[s] - pj));
    r[1] = std::max(r[1], std::abs(gb.J[s] + gb.h[s] - g[s] - ph - pout_j));
    r[2] = std::max(r[2], std::abs(pv - (gb.h[s] - pout_h) - gb.v_aux[s]));
  }
  return r;
}

/// Assembles the 3n x 3n system of the gain-bias identities, replacing the
/// first identity's row at each recurrent-class anchor by v(anchor) = 0, and
/// solves it by sparse LU with a few rounds of iterative refinement.
inline gain_bias evaluate_gain_bias(const markov_chain& p, const std::vector<char>& in_E, const std::vector<double>& g) {
  const std::size_t n = p.size();
  if (in_E.size() != n || g.size() != n) throw format_error("gain-bias inputs have mismatched sizes");
  if (!is_proper(p, in_E)) throw improper_policy("some state cannot reach the cycle set under this policy pair");

  gain_bias gb;
  gb.recurrent_classes = recurrent_classes(p);
  std::vector<char> is_anchor(n, 0);
  for (const auto& cls : gb.recurrent_classes) {
    std::size_t a = anchor_state(p, cls);
    gb.anchors.push_back(a);
    is_anchor[a] = 1;
  }

  const auto N = static_cast<Eigen::Index>(n);
  auto J = [&](std::size_t s) { return static_cast<Eigen::Index>(s); };
  auto H = [&](std::size_t s) { return N + static_cast<Eigen::Index>(s); };
  auto V = [&](std::size_t s) { return 2 * N + static_cast<Eigen::Index>(s); };
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * N);
  for (std::size_t s = 0; s < n; ++s) {
    const Eigen::Index r1 = J(s), r2 = H(s), r3 = V(s);
    if (is_anchor[s]) {
      trips.emplace_back(r1, V(s), 1.0);
    } else {
      trips.emplace_back(r1, J(s), 1.0);
      for (const auto& e : p.rows[s]) trips.emplace_back(r1, J(e.target), -e.prob);
    }
    trips.emplace_back(r2, J(s), 1.0);
    trips.emplace_back(r2, H(s), 1.0);
    rhs[r2] = g[s];
    trips.emplace_back(r3, V(s), -1.0);
    trips.emplace_back(r3, H(s), -1.0);
    for (const auto& e : p.rows[s]) {
      trips.emplace_back(r2, H(e.target), -e.prob);
      trips.emplace_back(r3, V(e.target), e.prob);
      if (!in_E[e.target]) {
        trips.emplace_back(r2, J(e.target), -e.prob);
        trips.emplace_back(r3, H(e.target), e.prob);
      }
    }
  }
  Eigen::SparseMatrix<double> a(3 * N, 3 * N);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw singular_system("gain-bias system could not be factorized");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw singular_system("gain-bias system has no solution");
  for (int round = 0; round < 3; ++round) {
    Eigen::VectorXd r = rhs - a * x;
    if (r.lpNorm<Eigen::Infinity>() <= 1e-12) break;
    x += lu.solve(r);
  }
  gb.J.assign(x.data(), x.data() + N);
  gb.h.assign(x.data() + N, x.data() + 2 * N);
  gb.v_aux.assign(x.data() + 2 * N, x.data() + 3 * N);
  auto r = gain_bias_residuals(p, in_E, g, gb);
  gb.residual = std::max({r[0], r[1], r[2]});
  double scale = 1.0;
  for (std::size_t s = 0; s < n; ++s)
    scale = std::max({scale, std::abs(gb.J[s]), std::abs(gb.h[s]), std::abs(gb.v_aux[s]), std::abs(g[s])});
  if (gb.residual > 1e-8 * scale)
    throw singular_system("gain-bias residual " + text::format_double(gb.residual) + " exceeds 1e-8 relative to " +
                          text::format_double(scale));
  return gb;
}

inline gain_bias evaluate_gain_bias(const stochastic_game& game, const mixed_policy& mu, const mixed_policy& tau,
                                    const std::vector<char>& in_E, const cost_assignment& cost) {
  return evaluate_gain_bias(induced_chain(game, mu, tau), in_E, cost.g);
}

/// P = P_in + P_out split by target membership in E, with
/// P_hat = (I - P_out)^{-1} P_in and g_hat = (I - P_out)^{-1} g.
struct kernel_split {
  Eigen::MatrixXd P_in, P_out, P_hat;
  Eigen::VectorXd g_hat;
};

inline kernel_split split_kernel(const markov_chain& p, const std::vector<char>& in_E, const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(p.size());
  kernel_split k;
  k.P_in = Eigen::MatrixXd::Zero(n, n);
  k.P_out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < p.size(); ++s)
    for (const auto& e : p.rows[s])
      (in_E[e.target] ? k.P_in : k.P_out)(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e.target)) += e.prob;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(n, n) - k.P_out);
  k.P_hat = lu.solve(k.P_in);
  k.g_hat = lu.solve(Eigen::Map<const Eigen::VectorXd>(g.data(), n));
  return k;
}

/// First-passage quantities towards a reference state r of a chain:
/// xi(s) = g(s) + sum_{k != r} P(s,k) xi(k), o(s) = 1 + sum_{k != r} P(s,k) o(k),
/// and zeta = xi(r) / o(r).
struct first_passage {
  Eigen::VectorXd xi, o;
  double zeta = 0.0;
};

inline first_passage first_passage_costs(const Eigen::MatrixXd& P, const Eigen::VectorXd& g, Eigen::Index ref) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - P;
  a.col(ref) += P.col(ref);  // transitions into r end the passage
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  first_passage fp;
  fp.xi = lu.solve(g);
  fp.o = lu.solve(Eigen::VectorXd::Ones(n));
  fp.zeta = fp.xi[ref] / fp.o[ref];
  return fp;
}

// ---------------------------------------------------------------------------
// Operators

/// M[u_C][u_A] = g(s) + sum_{s'} Pr h(s') + sum_{s' not in E} Pr J(s').
inline Eigen::MatrixXd cycle_cost_matrix(const stochastic_game& game, std::size_t s, const gain_bias& gb,
                                         const std::vector<char>& in_E, const cost_assignment& cost) {
  const std::size_t nc = game.num_controller_actions(s), na = game.num_adversary_actions(s);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(na));
  for (std::size_t uc = 0; uc < nc; ++uc)
    for (std::size_t ua = 0; ua < na; ++ua) {
      double acc = cost.g[s];
      for (const auto& t : game.row(s, uc, ua)) {
        acc += t.prob * gb.h[t.target];
        if (!in_E[t.target]) acc += t.prob * gb.J[t.target];
      }
      m(static_cast<Eigen::Index>(uc), static_cast<Eigen::Index>(ua)) = acc;
    }
  return m;
}

/// (T_mu(J,h))(s): the adversary's best reply to mu(s) in the matrix above.
inline double t_mu_at(const Eigen::MatrixXd& m, const std::vector<double>& mu) {
  Eigen::Map<const Eigen::VectorXd> p(mu.data(), m.rows());
  return (p.transpose() * m).maxCoeff();
}

struct improvement {
  mixed_policy mu;
  std::vector<double> t_star;  // (T*(J,h))(s)
};

/// Controller minimizes, adversary maximizes the matrix above at each state.
/// When `current` already attains T* within tolerance its distribution is kept.
inline improvement improve_policy(const stochastic_game& game, const gain_bias& gb, const std::vector<char>& in_E,
                                  const cost_assignment& cost, const mixed_policy* current = nullptr) {
  const std::size_t n = game.num_states();
  improvement out{mixed_policy{player::controller, std::vector<std::vector<double>>(n)}, std::vector<double>(n)};
  parallel_for(n, [&](std::size_t s) {
    Eigen::MatrixXd m = cycle_cost_matrix(game, s, gb, in_E, cost);
    game_solution sol = solve_zero_sum(-m);
    out.t_star[s] = -sol.value;
    double tol = 1e-9 * std::max(1.0, std::abs(out.t_star[s]));
    if (current && t_mu_at(m, current->dist[s]) <= out.t_star[s] + tol) out.mu.dist[s] = current->dist[s];
    else out.mu.dist[s] = sol.row_strategy;
  });
  return out;
}

/// sup_s |J(s) + h(s) - (T*(J,h))(s)|.
inline double optimality_residual(const stochastic_game& game, const gain_bias& gb, const std::vector<char>& in_E,
                                  const cost_assignment& cost) {
  auto imp = improve_policy(game, gb, in_E, cost);
  double r = 0.0;
  for (std::size_t s = 0; s < game.num_states(); ++s) r = std::max(r, std::abs(gb.J[s] + gb.h[s] - imp.t_star[s]));
  return r;
}

// ---------------------------------------------------------------------------
// Adversary best response and policy iteration

struct cost_response {
  mixed_policy tau;
  gain_bias gb;
};

/// Adversary maximizing the cost per cycle against a fixed controller policy,
/// by policy iteration over deterministic responses that keep the pair
/// proper; a switch that would make the cycle set unreachable is skipped.
inline cost_response best_response_cost(const stochastic_game& game, const mixed_policy& mu,
                                        const std::vector<char>& in_E, const cost_assignment& cost,
                                        const mixed_policy* warm_start = nullptr, std::size_t max_rounds = 1000) {
  const std::size_t n = game.num_states();
  mixed_policy tau = warm_start ? *warm_start : uniform_policy(game, player::adversary);
  if (!is_proper(induced_chain(game, mu, tau), in_E)) {
    tau = uniform_policy(game, player::adversary);
    if (!is_proper(induced_chain(game, mu, tau), in_E))
      throw improper_policy("controller policy cannot reach the cycle set against the uniform adversary");
  }
  cost_response out;
  for (std::size_t round = 0;; ++round) {
    out.tau = tau;
    out.gb = evaluate_gain_bias(game, mu, tau, in_E, cost);
    if (round >= max_rounds) throw iteration_cap("adversary policy iteration hit the round cap");

    // Gain first (P J), then the bias expression, both maximized.
    std::vector<std::size_t> changed;
    std::vector<std::vector<double>> proposal(n);
    for (std::size_t s = 0; s < n; ++s) {
      Eigen::MatrixXd m = cycle_cost_matrix(game, s, out.gb, in_E, cost);
      Eigen::Map<const Eigen::VectorXd> p(mu.dist[s].data(), m.rows());
      Eigen::RowVectorXd q = p.transpose() * m;
      std::vector<double> gain(game.num_adversary_actions(s), 0.0);
      for (std::size_t ua = 0; ua < gain.size(); ++ua)
        for (std::size_t uc = 0; uc < mu.dist[s].size(); ++uc) {
          if (mu.dist[s][uc] == 0.0) continue;
          for (const auto& t : game.row(s, uc, ua)) gain[ua] += mu.dist[s][uc] * t.prob * out.gb.J[t.target];
        }
      double cur_gain = 0, cur_q = 0;
      for (std::size_t ua = 0; ua < gain.size(); ++ua) {
        cur_gain += tau.dist[s][ua] * gain[ua];
        cur_q += tau.dist[s][ua] * q[static_cast<Eigen::Index>(ua)];
      }
      double best_gain = *std::max_element(gain.begin(), gain.end());
      double tol_g = 1e-9 * std::max(1.0, std::abs(best_gain));
      std::size_t best = no_state;
      if (best_gain > cur_gain + tol_g) {
        for (std::size_t ua = 0; ua < gain.size(); ++ua)
          if (gain[ua] >= best_gain - tol_g && (best == no_state || q[static_cast<Eigen::Index>(ua)] > q[static_cast<Eigen::Index>(best)]))
            best = ua;
      } else {
        double best_q = cur_q;
        double tol_q = 1e-9 * std::max(1.0, std::abs(cur_q));
        for (std::size_t ua = 0; ua < gain.size(); ++ua)
          if (gain[ua] >= cur_gain - tol_g && q[static_cast<Eigen::Index>(ua)] > best_q + tol_q)
            best_q = q[static_cast<Eigen::Index>(ua)], best = ua;
      }
      if (best != no_state) {
        proposal[s].assign(gain.size(), 0.0);
        proposal[s][best] = 1.0;
        changed.push_back(s);
      }
    }
    if (changed.empty()) break;

    mixed_policy next = tau;
    for (std::size_t s : changed) next.dist[s] = proposal[s];
    bool progress = false;
    if (is_proper(induced_chain(game, mu, next), in_E)) {
      tau = std::move(next);
      progress = true;
    } else {
      for (std::size_t s : changed) {
        auto saved = tau.dist[s];
        tau.dist[s] = proposal[s];
        if (is_proper(induced_chain(game, mu, tau), in_E)) progress = true;
        else tau.dist[s] = std::move(saved);
      }
    }
    if (!progress) break;
  }
  return out;
}

struct gain_trace_entry {
  double J_max = 0.0;
  double J_min = 0.0;
};

struct policy_iteration_options {
  std::size_t max_iterations = 10000;
  double tolerance = 1e-9;
};

struct policy_iteration_result {
  mixed_policy mu, tau;
  gain_bias gb;
  std::vector<gain_trace_entry> trace;
  std::size_t iterations = 0;
  double optimality_residual = 0.0;
  bool gains_non_increasing = true;
  bool used_fallback_start = false;
};

/// Alternates evaluation against the worst-case proper adversary with the
/// T* improvement until consecutive T* outputs agree within tolerance (or the
/// improvement keeps every state's distribution).
inline policy_iteration_result policy_iteration(const stochastic_game& game, const std::vector<char>& in_E,
                                                const cost_assignment& cost, std::optional<mixed_policy> mu0 = {},
                                                const policy_iteration_options& opt = {}) {
  policy_iteration_result out;
  mixed_policy mu = mu0 ? *mu0 : uniform_policy(game, player::controller);
  if (!is_proper(induced_chain(game, mu, uniform_policy(game, player::adversary)), in_E)) {
    auto vv = max_reach_values(game, in_E);
    mu = secure_reach_policy(game, in_E, vv.v);
    out.used_fallback_start = true;
  }
  std::optional<std::vector<double>> prev_t;
  std::optional<mixed_policy> tau;
  for (std::size_t k = 0;; ++k) {
    if (k >= opt.max_iterations) throw iteration_cap("policy iteration hit the iteration cap");
    auto br = best_response_cost(game, mu, in_E, cost, tau ? &*tau : nullptr);
    tau = br.tau;
    const auto& J = br.gb.J;
    gain_trace_entry e{*std::max_element(J.begin(), J.end()), *std::min_element(J.begin(), J.end())};
    if (!out.trace.empty()) {
      const auto& prev = out.gb.J;
      const double slack = opt.tolerance * std::max(magnitude(out.gb), magnitude(br.gb));
      for (std::size_t s = 0; s < J.size(); ++s)
        if (J[s] > prev[s] + slack) out.gains_non_increasing = false;
    }
    out.trace.push_back(e);
    out.mu = mu;
    out.tau = *tau;
    out.gb = br.gb;
    out.iterations = k + 1;

    auto imp = improve_policy(game, br.gb, in_E, cost, &mu);
    bool same_policy = imp.mu.dist == mu.dist;
    bool same_t = false;
    if (prev_t) {
      same_t = true;
      for (std::size_t s = 0; s < imp.t_star.size(); ++s)
        if (std::abs(imp.t_star[s] - (*prev_t)[s]) > opt.tolerance * std::max(1.0, std::abs(imp.t_star[s])))
          same_t = false;
    }
    if (same_policy || same_t) break;
    prev_t = std::move(imp.t_star);
    mu = std::move(imp.mu);
  }
  out.optimality_residual = optimality_residual(game, out.gb, in_E, cost);
  return out;
}

/// mu*(s) = mu_reach(s) outside E and mu_cycle(s) inside E.
inline mixed_policy combine_policies(const mixed_policy& mu_reach, const mixed_policy& mu_cycle,
                                     const std::vector<char>& in_E) {
  if (mu_reach.dist.size() != in_E.size() || mu_cycle.dist.size() != in_E.size())
    throw format_error("policies to combine must cover the same states");
  mixed_policy out{player::controller, std::vector<std::vector<double>>(in_E.size())};
  for (std::size_t s = 0; s < in_E.size(); ++s) out.dist[s] = in_E[s] ? mu_cycle.dist[s] : mu_reach.dist[s];
  return out;
}

/// The game with the adversary replaced by a fixed mixed policy (a single
/// adversary action per state), i.e. the controller's MDP.
inline stochastic_game marginalize_adversary(const stochastic_game& game, const mixed_policy& tau) {
  game_builder b(game.alphabet());
  for (std::size_t s = 0; s < game.num_states(); ++s)
    b.add_state(game.state_name(s), game.label(s), game.controller_actions(s), {"fixed"});
  std::vector<double> scratch(game.num_states(), 0.0);
  std::vector<std::size_t> touched;
  for (std::size_t s = 0; s < game.num_states(); ++s)
    for (std::size_t uc = 0; uc < game.num_controller_actions(s); ++uc) {
      std::vector<double> point(game.num_controller_actions(s), 0.0);
      point[uc] = 1.0;
      auto row = induced_row(game, point, tau.dist[s], s, scratch, touched);
      double total = 0.0;
      for (const auto& t : row) total += t.prob;
      for (const auto& t : row) b.add(s, uc, 0, t.target, t.prob / total);
    }
  b.set_initial(game.initial());
  return std::move(b).build();
}

}  // namespace sls
