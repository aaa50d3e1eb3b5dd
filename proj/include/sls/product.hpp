#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sls/automata.hpp"
#include "sls/error.hpp"
#include "sls/game.hpp"

namespace sls {

inline constexpr std::size_t no_state = static_cast<std::size_t>(-1);

/// Synchronous product of a game and a DRA. The product is itself a
/// stochastic_game whose state (s, q) has index s * |Q| + q and name "s|q".
/// After modify_product() it carries one extra absorbing state `dest`.
struct product_game {
  stochastic_game game;
  dra automaton;
  std::vector<letter_mask> base_letter;  // L(s) in the automaton's alphabet
  std::size_t num_base_states = 0;
  std::vector<rabin_pair> pairs;  // lifted, one flag per product state
  std::vector<char> reachable;    // from the initial product state
  std::size_t dest = no_state;  // d is always the last controller action

  std::size_t num_states() const { return game.num_states(); }
  std::size_t num_automaton_states() const { return automaton.num_states(); }
  std::size_t index(std::size_t s, std::size_t q) const { return s * automaton.num_states() + q; }
  std::size_t base_state(std::size_t x) const { return x == dest ? no_state : x / automaton.num_states(); }
  std::size_t automaton_state(std::size_t x) const { return x == dest ? no_state : x % automaton.num_states(); }
};

/// Translation from game label masks to automaton letters; both alphabets
/// must contain the same propositions.
inline std::vector<letter_mask> automaton_letters(const stochastic_game& g, const dra& d) {
  auto a = g.alphabet(), b = d.alphabet();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw alphabet_mismatch("game alphabet {" + text::join(a, ",") + "} differs from automaton alphabet {" +
                                      text::join(b, ",") + "}");
  std::vector<letter_mask> out(g.num_states());
  for (std::size_t s = 0; s < g.num_states(); ++s) out[s] = d.mask_of(g.label_set(s));
  return out;
}

inline std::vector<char> reachable_states(const stochastic_game& g, std::size_t from) {
  std::vector<char> seen(g.num_states(), 0);
  std::vector<std::size_t> work{from};
  seen[from] = 1;
  while (!work.empty()) {
    std::size_t s = work.back();
    work.pop_back();
    for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
      for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
        for (const auto& t : g.row(s, uc, ua))
          if (!seen[t.target]) seen[t.target] = 1, work.push_back(t.target);
  }
  return seen;
}

/// Pr_G((s,q),u_C,u_A,(s',q')) = Pr(s,u_C,u_A,s') when q' = delta(q, L(s')).
/// The initial state is (s0, delta(q0, L(s0))). Unreachable pairs are kept.
inline product_game build_product(const stochastic_game& g, const dra& d) {
  product_game p;
  p.automaton = d;
  p.base_letter = automaton_letters(g, d);
  p.num_base_states = g.num_states();
  const std::size_t nq = d.num_states();

  game_builder b(g.alphabet());
  for (std::size_t s = 0; s < g.num_states(); ++s)
    for (std::size_t q = 0; q < nq; ++q)
      b.add_state(g.state_name(s) + "|" + d.states()[q], g.label(s), g.controller_actions(s),
                  g.adversary_actions(s));
  for (std::size_t s = 0; s < g.num_states(); ++s)
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
        for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
          for (const auto& t : g.row(s, uc, ua))
            b.add(s * nq + q, uc, ua, t.target * nq + d.next(q, p.base_letter[t.target]), t.prob);
  b.set_initial(g.initial() * nq + d.next(d.initial(), p.base_letter[g.initial()]));
  p.game = std::move(b).build();

  for (const auto& pair : d.pairs()) {
    rabin_pair lifted{std::vector<char>(p.game.num_states(), 0), std::vector<char>(p.game.num_states(), 0)};
    for (std::size_t x = 0; x < p.game.num_states(); ++x) {
      lifted.L[x] = pair.L[x % nq];
      lifted.K[x] = pair.K[x % nq];
    }
    p.pairs.push_back(std::move(lifted));
  }
  p.reachable = reachable_states(p.game, p.game.initial());
  return p;
}

/// Runs a product-level policy on the base game by tracking the automaton
/// state online: after observing s, q <- delta(q, L(s)) and the emitted
/// distribution is the product policy at (s, q).
class executable_policy {
public:
  executable_policy(const product_game& p, mixed_policy mu, std::vector<policy_phase> phases = {})
      : p_(&p), mu_(std::move(mu)), phases_(std::move(phases)) {}

  /// Resets to the automaton's initial state and observes s0.
  const std::vector<double>& start(std::size_t s0) {
    q_ = p_->automaton.initial();
    return observe(s0);
  }

  const std::vector<double>& observe(std::size_t s) {
    q_ = p_->automaton.next(q_, p_->base_letter[s]);
    x_ = p_->index(s, q_);
    return mu_.dist[x_];
  }

  std::size_t automaton_state() const { return q_; }
  std::size_t product_state() const { return x_; }
  policy_phase phase() const { return phases_.empty() ? policy_phase::none : phases_[x_]; }
  const mixed_policy& product_policy() const { return mu_; }

private:
  const product_game* p_;
  mixed_policy mu_;
  std::vector<policy_phase> phases_;
  std::size_t q_ = 0, x_ = 0;
};

inline executable_policy lift_policy(const product_game& p, const mixed_policy& mu,
                                     std::vector<policy_phase> phases = {}) {
  if (mu.dist.size() < p.num_base_states * p.num_automaton_states())
    throw format_error("product policy does not cover every product state");
  return executable_policy(p, mu, std::move(phases));
}

}  // namespace sls
