#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <vector>

#include "sls/game.hpp"
#include "sls/graph.hpp"
#include "sls/product.hpp"

namespace sls {

/// One component (C_h, D_h): states ascending, enabled[i] lists the enabled
/// controller actions of states[i] ascending; `pair` is the 0-based index of
/// the first Rabin pair it satisfies.
struct gamec {
  std::vector<std::size_t> states;
  std::vector<std::vector<std::size_t>> enabled;
  std::size_t pair = 0;

  bool contains(std::size_t s) const { return std::binary_search(states.begin(), states.end(), s); }
  const std::vector<std::size_t>& enabled_at(std::size_t s) const {
    return enabled[static_cast<std::size_t>(std::lower_bound(states.begin(), states.end(), s) - states.begin())];
  }
};

struct gamec_set {
  std::vector<gamec> components;  // ordered by smallest state
  std::vector<char> in_E;         // E = union of component states
  std::vector<std::size_t> component_of;  // no_state outside E
};

/// True iff (C, D) meets the Rabin condition of some pair: no L(z) state in
/// C and at least one K(z) state in C. Returns the pair index, or no_state.
inline std::size_t accepting_pair(const std::vector<rabin_pair>& pairs, const std::vector<std::size_t>& states) {
  for (std::size_t z = 0; z < pairs.size(); ++z) {
    bool hits_l = false, hits_k = false;
    for (std::size_t s : states) {
      hits_l = hits_l || pairs[z].L[s];
      hits_k = hits_k || pairs[z].K[s];
    }
    if (!hits_l && hits_k) return z;
  }
  return no_state;
}

/// Maximal generalized end components (C, D): for every s in C and u_C in
/// D(s), every positive-probability successor under every u_A stays in C,
/// and the digraph with an edge s -> s' whenever some enabled u_C and some
/// u_A reach s' is strongly connected. A singleton qualifies only when some
/// enabled action keeps it in place. Adversary action sets are not pruned.
inline std::vector<gamec> maximal_end_components(const stochastic_game& g) {
  const std::size_t n = g.num_states();
  std::vector<std::vector<char>> enabled(n);
  for (std::size_t s = 0; s < n; ++s) enabled[s].assign(g.num_controller_actions(s), 1);

  // pred[t] lists (s, u_C) pairs with some u_A reaching t.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pred(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
      for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
        for (const auto& t : g.row(s, uc, ua)) pred[t.target].emplace_back(s, uc);
  for (auto& p : pred) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }

  std::vector<std::size_t> member(n, 0);  // candidate id + 1, 0 = removed
  std::vector<std::vector<std::size_t>> candidates{{}};
  for (std::size_t s = 0; s < n; ++s) candidates[0].push_back(s), member[s] = 1;

  auto leaves = [&](std::size_t s, std::size_t uc, std::size_t id) {
    for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
      for (const auto& t : g.row(s, uc, ua))
        if (member[t.target] != id) return true;
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::size_t>> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const std::size_t id = c + 1;
      auto& cand = candidates[c];
      // Drop actions that may leave the candidate, then states left without
      // actions, propagating backwards through predecessor lists.
      std::deque<std::size_t> removed;
      for (std::size_t s : cand) {
        bool any = false;
        for (std::size_t uc = 0; uc < enabled[s].size(); ++uc) {
          if (enabled[s][uc] && leaves(s, uc, id)) enabled[s][uc] = 0;
          any = any || enabled[s][uc];
        }
        if (!any) removed.push_back(s);
      }
      for (std::size_t s : removed) member[s] = 0;
      while (!removed.empty()) {
        std::size_t t = removed.front();
        removed.pop_front();
        changed = true;
        for (auto [s, uc] : pred[t]) {
          if (member[s] != id || !enabled[s][uc]) continue;
          enabled[s][uc] = 0;
          if (std::none_of(enabled[s].begin(), enabled[s].end(), [](char e) { return e != 0; })) {
            member[s] = 0;
            removed.push_back(s);
          }
        }
      }
      std::vector<std::size_t> alive;
      for (std::size_t s : cand)
        if (member[s] == id) alive.push_back(s);
      if (alive.empty()) continue;

      // Split by strongly connected components of the restricted digraph.
      std::vector<std::size_t> local(n, no_state);
      for (std::size_t i = 0; i < alive.size(); ++i) local[alive[i]] = i;
      digraph sub(alive.size());
      std::vector<char> self_loop(alive.size(), 0);
      for (std::size_t i = 0; i < alive.size(); ++i) {
        std::size_t s = alive[i];
        for (std::size_t uc = 0; uc < enabled[s].size(); ++uc) {
          if (!enabled[s][uc]) continue;
          for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
            for (const auto& t : g.row(s, uc, ua)) {
              sub[i].push_back(local[t.target]);
              if (t.target == s) self_loop[i] = 1;
            }
        }
        std::sort(sub[i].begin(), sub[i].end());
        sub[i].erase(std::unique(sub[i].begin(), sub[i].end()), sub[i].end());
      }
      auto sccs = strongly_connected_components(sub);
      if (sccs.size() != 1) changed = true;
      for (const auto& scc : sccs) {
        if (scc.size() == 1 && !self_loop[scc[0]]) {
          member[alive[scc[0]]] = 0;
          changed = true;
          continue;
        }
        std::vector<std::size_t> comp;
        for (std::size_t i : scc) comp.push_back(alive[i]);
        next.push_back(std::move(comp));
      }
    }
    candidates = std::move(next);
    for (std::size_t c = 0; c < candidates.size(); ++c)
      for (std::size_t s : candidates[c]) member[s] = c + 1;
  }

  std::vector<gamec> out;
  for (auto& cand : candidates) {
    gamec m;
    m.states = cand;
    std::sort(m.states.begin(), m.states.end());
    for (std::size_t s : m.states) {
      std::vector<std::size_t> acts;
      for (std::size_t uc = 0; uc < enabled[s].size(); ++uc)
        if (enabled[s][uc]) acts.push_back(uc);
      m.enabled.push_back(std::move(acts));
    }
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const gamec& a, const gamec& b) { return a.states.front() < b.states.front(); });
  return out;
}

/// Keeps the maximal end components that satisfy some Rabin pair.
inline gamec_set compute_gamecs(const stochastic_game& g, const std::vector<rabin_pair>& pairs) {
  gamec_set out;
  out.in_E.assign(g.num_states(), 0);
  out.component_of.assign(g.num_states(), no_state);
  for (auto& m : maximal_end_components(g)) {
    std::size_t z = accepting_pair(pairs, m.states);
    if (z == no_state) continue;
    m.pair = z;
    for (std::size_t s : m.states) {
      out.in_E[s] = 1;
      out.component_of[s] = out.components.size();
    }
    out.components.push_back(std::move(m));
  }
  return out;
}

inline gamec_set compute_gamecs(const product_game& p) { return compute_gamecs(p.game, p.pairs); }

/// A component as a standalone game: states ordered like `states`, only the
/// enabled controller actions kept, adversary actions untouched.
struct restricted_game {
  stochastic_game game;
  std::vector<std::size_t> states;                 // local -> original index
  std::vector<std::vector<std::size_t>> actions;   // local action -> original action
};

inline restricted_game restrict_to_component(const stochastic_game& g, const gamec& c) {
  restricted_game out;
  out.states = c.states;
  out.actions = c.enabled;
  std::vector<std::size_t> local(g.num_states(), no_state);
  for (std::size_t i = 0; i < c.states.size(); ++i) local[c.states[i]] = i;
  game_builder b(g.alphabet());
  for (std::size_t i = 0; i < c.states.size(); ++i) {
    std::size_t s = c.states[i];
    std::vector<std::string> names;
    for (std::size_t uc : c.enabled[i]) names.push_back(g.controller_actions(s)[uc]);
    b.add_state(g.state_name(s), g.label(s), std::move(names), g.adversary_actions(s));
  }
  for (std::size_t i = 0; i < c.states.size(); ++i) {
    std::size_t s = c.states[i];
    for (std::size_t k = 0; k < c.enabled[i].size(); ++k)
      for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
        for (const auto& t : g.row(s, c.enabled[i][k], ua)) {
          if (local[t.target] == no_state) throw format_error("component is not closed under its enabled actions");
          b.add(i, k, ua, local[t.target], t.prob);
        }
  }
  b.set_initial(0);
  out.game = std::move(b).build();
  return out;
}

/// Text report: one line per component, `h pair=z states=a,b,... ` followed
/// by `  state: action action ...` lines.
inline std::string write_gamecs(const stochastic_game& g, const gamec_set& gs) {
  std::string out = "gamecs " + std::to_string(gs.components.size()) + "\n";
  for (std::size_t h = 0; h < gs.components.size(); ++h) {
    const auto& c = gs.components[h];
    out += "component " + std::to_string(h + 1) + " pair " + std::to_string(c.pair + 1) + " size " +
           std::to_string(c.states.size()) + "\n";
    for (std::size_t i = 0; i < c.states.size(); ++i) {
      out += "  " + g.state_name(c.states[i]);
      for (std::size_t uc : c.enabled[i]) out += " " + g.controller_actions(c.states[i])[uc];
      out += "\n";
    }
  }
  return out;
}

}  // namespace sls
