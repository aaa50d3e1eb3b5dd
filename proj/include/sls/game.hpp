#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "sls/automata.hpp"
#include "sls/error.hpp"
#include "sls/ltl.hpp"
#include "sls/text.hpp"

namespace sls {

inline constexpr double row_sum_tolerance = 1e-9;

struct transition {
  std::size_t target;
  double prob;
};

/// Labeled concurrent two-player stochastic game. Rows are stored sparsely,
/// one per (s, u_C, u_A), targets ascending.
class stochastic_game {
public:
  std::size_t num_states() const { return names_.size(); }
  std::size_t num_controller_actions(std::size_t s) const { return controller_actions_[s].size(); }
  std::size_t num_adversary_actions(std::size_t s) const { return adversary_actions_[s].size(); }
  const std::vector<std::string>& controller_actions(std::size_t s) const { return controller_actions_[s]; }
  const std::vector<std::string>& adversary_actions(std::size_t s) const { return adversary_actions_[s]; }

  std::span<const transition> row(std::size_t s, std::size_t uc, std::size_t ua) const {
    std::size_t r = row_base_[s] + uc * adversary_actions_[s].size() + ua;
    return {entries_.data() + row_start_[r], entries_.data() + row_start_[r + 1]};
  }

  std::size_t initial() const { return initial_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  letter_mask label(std::size_t s) const { return labels_[s]; }
  ltl::letter label_set(std::size_t s) const {
    ltl::letter l;
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
      if (labels_[s] >> i & 1u) l.insert(alphabet_[i]);
    return l;
  }
  const std::string& state_name(std::size_t s) const { return names_[s]; }

  std::size_t find_state(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw format_error("unknown state '" + std::string(name) + "'");
    return it->second;
  }

  std::size_t num_transitions() const { return entries_.size(); }

private:
  friend class game_builder;

  std::vector<std::string> alphabet_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<letter_mask> labels_;
  std::vector<std::vector<std::string>> controller_actions_, adversary_actions_;
  std::vector<std::size_t> row_base_;
  std::vector<std::size_t> row_start_;
  std::vector<transition> entries_;
  std::size_t initial_ = 0;
};

/// Incremental construction of a stochastic_game; build() validates.
class game_builder {
public:
  explicit game_builder(std::vector<std::string> alphabet) {
    if (alphabet.size() > max_alphabet_size) throw format_error("alphabet larger than 16 propositions");
    for (const auto& p : alphabet)
      if (!ltl::is_valid_atom_name(p)) throw format_error("invalid proposition name '" + p + "'");
    g_.alphabet_ = std::move(alphabet);
  }

  std::size_t add_state(std::string name, letter_mask label, std::vector<std::string> controller_actions,
                        std::vector<std::string> adversary_actions) {
    if (g_.index_.count(name)) throw format_error("duplicate state '" + name + "'");
    if (label >> g_.alphabet_.size()) throw unknown_proposition("label outside the alphabet at '" + name + "'");
    std::size_t s = g_.names_.size();
    g_.index_.emplace(name, s);
    g_.names_.push_back(std::move(name));
    g_.labels_.push_back(label);
    g_.row_base_.push_back(rows_.size());
    rows_.resize(rows_.size() + controller_actions.size() * adversary_actions.size());
    g_.controller_actions_.push_back(std::move(controller_actions));
    g_.adversary_actions_.push_back(std::move(adversary_actions));
    return s;
  }

  std::size_t num_states() const { return g_.names_.size(); }

  letter_mask mask_of(const std::vector<std::string>& props) const {
    letter_mask m = 0;
    for (const auto& p : props) {
      auto it = std::find(g_.alphabet_.begin(), g_.alphabet_.end(), p);
      if (it == g_.alphabet_.end()) throw unknown_proposition("'" + p + "' is not in the game alphabet");
      m |= letter_mask{1} << (it - g_.alphabet_.begin());
    }
    return m;
  }

  /// Adds probability mass; repeated (row, target) entries accumulate.
  void add(std::size_t s, std::size_t uc, std::size_t ua, std::size_t target, double prob) {
    if (!(prob >= 0.0 && prob <= 1.0 + row_sum_tolerance))
      throw format_error("probability " + text::format_double(prob) + " outside [0,1] at '" + g_.names_[s] + "'");
    rows_[g_.row_base_[s] + uc * g_.adversary_actions_[s].size() + ua].push_back({target, prob});
  }

  void set_initial(std::size_t s) { g_.initial_ = s; }

  stochastic_game build() && {
    const std::size_t n = g_.names_.size();
    if (n == 0) throw format_error("game without states");
    if (g_.initial_ >= n) throw format_error("initial state out of range");
    g_.row_start_.assign(1, 0);
    g_.entries_.clear();
    for (std::size_t s = 0; s < n; ++s) {
      if (g_.controller_actions_[s].empty() || g_.adversary_actions_[s].empty())
        throw empty_action_set("state '" + g_.names_[s] + "' has an empty action set");
      for (std::size_t uc = 0; uc < g_.controller_actions_[s].size(); ++uc) {
        for (std::size_t ua = 0; ua < g_.adversary_actions_[s].size(); ++ua) {
          auto& row = rows_[g_.row_base_[s] + uc * g_.adversary_actions_[s].size() + ua];
          std::stable_sort(row.begin(), row.end(),
                           [](const transition& a, const transition& b) { return a.target < b.target; });
          double sum = 0.0;
          std::size_t first = g_.entries_.size();
          for (const auto& t : row) {
            if (t.target >= n) throw format_error("transition target out of range at '" + g_.names_[s] + "'");
            sum += t.prob;
            if (t.prob == 0.0) continue;
            if (g_.entries_.size() > first && g_.entries_.back().target == t.target)
              g_.entries_.back().prob += t.prob;
            else
              g_.entries_.push_back(t);
          }
          if (std::abs(sum - 1.0) > row_sum_tolerance) {
            throw row_sum_error("row (" + g_.names_[s] + ", " + g_.controller_actions_[s][uc] + ", " +
                                g_.adversary_actions_[s][ua] + ") sums to " + text::format_double(sum));
          }
          g_.row_start_.push_back(g_.entries_.size());
          row.clear();
          row.shrink_to_fit();
        }
      }
    }
    return std::move(g_);
  }

private:
  stochastic_game g_;
  std::vector<std::vector<transition>> rows_;
};

// ---------------------------------------------------------------------------
// Game text format

/// Parses the `sg v1` format.
///
///     sg v1
///     alphabet goal
///     states
///     left
///     right
///     labels
///     right goal
///     actions
///     left C move stay A move stay
///     right C stay A stay
///     transitions
///     left move move left 1
///     ...
///     initial left
inline stochastic_game parse_game(std::string_view source) {
  enum class section { none, states, labels, actions, transitions } where = section::none;
  bool seen_header = false;
  std::vector<std::string> alphabet, names;
  std::map<std::string, std::vector<std::string>> labels;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> actions;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> transitions;
  std::string initial;

  for (auto& [lineno, line] : text::content_lines(source)) {
    auto w = text::words(line);
    auto fail = [&, ln = lineno](const std::string& msg) {
      throw format_error("line " + std::to_string(ln) + ": " + msg);
    };
    if (!seen_header) {
      if (w != std::vector<std::string>{"sg", "v1"}) fail("expected header 'sg v1'");
      seen_header = true;
      continue;
    }
    if (w[0] == "alphabet") {
      alphabet.assign(w.begin() + 1, w.end());
      where = section::none;
    } else if (w[0] == "initial") {
      if (w.size() != 2) fail("'initial' takes one state");
      initial = w[1];
      where = section::none;
    } else if (w.size() == 1 && w[0] == "states") {
      where = section::states;
    } else if (w.size() == 1 && w[0] == "labels") {
      where = section::labels;
    } else if (w.size() == 1 && w[0] == "actions") {
      where = section::actions;
    } else if (w.size() == 1 && w[0] == "transitions") {
      where = section::transitions;
    } else if (where == section::states) {
      for (auto& name : w) names.push_back(name);
    } else if (where == section::labels) {
      auto& l = labels[w[0]];
      l.insert(l.end(), w.begin() + 1, w.end());
    } else if (where == section::actions) {
      auto c = std::find(w.begin(), w.end(), "C");
      auto a = std::find(w.begin(), w.end(), "A");
      if (c != w.begin() + 1 || a == w.end()) fail("actions line needs 'state C ... A ...'");
      if (actions.count(w[0])) fail("actions given twice for '" + w[0] + "'");
      actions[w[0]] = {std::vector<std::string>(c + 1, a), std::vector<std::string>(a + 1, w.end())};
    } else if (where == section::transitions) {
      if (w.size() != 5) fail("transition needs 's uC uA s2 prob'");
      transitions.emplace_back(lineno, std::move(w));
    } else {
      fail("unexpected '" + w[0] + "'");
    }
  }
  if (!seen_header) throw format_error("empty game file");
  if (names.empty()) throw format_error("missing 'states'");
  if (initial.empty()) throw format_error("missing 'initial'");

  game_builder b(alphabet);
  for (const auto& name : names) {
    auto it = actions.find(name);
    std::vector<std::string> c, a;
    if (it != actions.end()) std::tie(c, a) = it->second;
    auto lit = labels.find(name);
    letter_mask m = lit == labels.end() ? 0 : b.mask_of(lit->second);
    b.add_state(name, m, c, a);
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  if (index.size() != names.size()) throw format_error("duplicate state name");
  auto state_of = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw format_error("unknown state '" + name + "'");
    return it->second;
  };
  for (const auto& [name, _] : labels) state_of(name);
  for (const auto& [name, _] : actions) state_of(name);
  for (const auto& [lineno, w] : transitions) {
    std::size_t s = state_of(w[0]);
    const auto& [c, a] = actions[w[0]];
    auto uc = std::find(c.begin(), c.end(), w[1]);
    auto ua = std::find(a.begin(), a.end(), w[2]);
    if (uc == c.end() || ua == a.end())
      throw format_error("line " + std::to_string(lineno) + ": unknown action at '" + w[0] + "'");
    b.add(s, static_cast<std::size_t>(uc - c.begin()), static_cast<std::size_t>(ua - a.begin()), state_of(w[3]),
          text::parse_double(w[4]));
  }
  b.set_initial(state_of(initial));
  return std::move(b).build();
}

inline stochastic_game load_game(const std::string& path) { return parse_game(text::read_file(path)); }

inline std::string write_game(const stochastic_game& g) {
  std::ostringstream out;
  out << "sg v1\nalphabet";
  for (const auto& p : g.alphabet()) out << ' ' << p;
  out << "\nstates\n";
  for (std::size_t s = 0; s < g.num_states(); ++s) out << g.state_name(s) << '\n';
  out << "labels\n";
  for (std::size_t s = 0; s < g.num_states(); ++s)
    if (g.label(s)) out << g.state_name(s) << ' ' << text::join(g.label_set(s), " ") << '\n';
  out << "actions\n";
  for (std::size_t s = 0; s < g.num_states(); ++s)
    out << g.state_name(s) << " C " << text::join(g.controller_actions(s), " ") << " A "
        << text::join(g.adversary_actions(s), " ") << '\n';
  out << "transitions\n";
  for (std::size_t s = 0; s < g.num_states(); ++s)
    for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
      for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
        for (const auto& t : g.row(s, uc, ua))
          out << g.state_name(s) << ' ' << g.controller_actions(s)[uc] << ' ' << g.adversary_actions(s)[ua] << ' '
              << g.state_name(t.target) << ' ' << text::format_double(t.prob) << '\n';
  out << "initial " << g.state_name(g.initial()) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Policies and induced chains

enum class player { controller, adversary };

inline const char* to_string(player p) { return p == player::controller ? "controller" : "adversary"; }

/// Stationary mixed strategy: dist[s][u] over the owner's actions at s.
struct mixed_policy {
  player owner = player::controller;
  std::vector<std::vector<double>> dist;
};

inline std::size_t num_actions(const stochastic_game& g, player p, std::size_t s) {
  return p == player::controller ? g.num_controller_actions(s) : g.num_adversary_actions(s);
}

inline mixed_policy uniform_policy(const stochastic_game& g, player owner) {
  mixed_policy mu{owner, {}};
  mu.dist.resize(g.num_states());
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    std::size_t k = num_actions(g, owner, s);
    mu.dist[s].assign(k, 1.0 / static_cast<double>(k));
  }
  return mu;
}

/// Point masses on choice[s].
inline mixed_policy pure_policy(const stochastic_game& g, player owner, const std::vector<std::size_t>& choice) {
  mixed_policy mu{owner, {}};
  mu.dist.resize(g.num_states());
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    mu.dist[s].assign(num_actions(g, owner, s), 0.0);
    mu.dist[s].at(choice.at(s)) = 1.0;
  }
  return mu;
}

inline void validate_policy(const stochastic_game& g, const mixed_policy& mu) {
  if (mu.dist.size() != g.num_states()) throw format_error("policy does not cover every state");
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    if (mu.dist[s].size() != num_actions(g, mu.owner, s))
      throw format_error("policy at '" + g.state_name(s) + "' has the wrong number of actions");
    double sum = 0;
    for (double p : mu.dist[s]) {
      if (!(p >= 0.0)) throw format_error("negative probability in policy at '" + g.state_name(s) + "'");
      sum += p;
    }
    if (std::abs(sum - 1.0) > row_sum_tolerance)
      throw row_sum_error("policy at '" + g.state_name(s) + "' sums to " + text::format_double(sum));
  }
}

/// Row-stochastic matrix over the game states, stored as sparse rows.
struct markov_chain {
  std::vector<std::vector<transition>> rows;

  std::size_t size() const { return rows.size(); }

  double at(std::size_t s, std::size_t t) const {
    for (const auto& e : rows[s])
      if (e.target == t) return e.prob;
    return 0.0;
  }

  Eigen::SparseMatrix<double> sparse() const {
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t s = 0; s < rows.size(); ++s)
      for (const auto& e : rows[s])
        trips.emplace_back(static_cast<int>(s), static_cast<int>(e.target), e.prob);
    Eigen::SparseMatrix<double> m(static_cast<int>(rows.size()), static_cast<int>(rows.size()));
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(sparse()); }
};

/// One state's row of P^{mu tau}, accumulated over (u_C, u_A) in index order
/// into a dense scratch buffer of the chain's size.
inline std::vector<transition> induced_row(const stochastic_game& g, const std::vector<double>& mu,
                                           const std::vector<double>& tau, std::size_t s, std::vector<double>& scratch,
                                           std::vector<std::size_t>& touched) {
  touched.clear();
  for (std::size_t uc = 0; uc < mu.size(); ++uc) {
    if (mu[uc] == 0.0) continue;
    for (std::size_t ua = 0; ua < tau.size(); ++ua) {
      double w = mu[uc] * tau[ua];
      if (w == 0.0) continue;
      for (const auto& t : g.row(s, uc, ua)) {
        if (scratch[t.target] == 0.0) touched.push_back(t.target);
        scratch[t.target] += w * t.prob;
      }
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  std::vector<transition> row;
  row.reserve(touched.size());
  for (std::size_t t : touched) {
    if (scratch[t] != 0.0) row.push_back({t, scratch[t]});
    scratch[t] = 0.0;
  }
  return row;
}

/// P^{mu tau}(s, s') = sum over (u_C, u_A) of mu(s,u_C) tau(s,u_A) Pr(s,u_C,u_A,s').
inline markov_chain induced_chain(const stochastic_game& g, const mixed_policy& mu, const mixed_policy& tau) {
  if (mu.owner != player::controller) throw owner_mismatch("first policy must belong to the controller");
  if (tau.owner != player::adversary) throw owner_mismatch("second policy must belong to the adversary");
  validate_policy(g, mu);
  validate_policy(g, tau);
  markov_chain chain;
  chain.rows.resize(g.num_states());
  std::vector<double> scratch(g.num_states(), 0.0);
  std::vector<std::size_t> touched;
  for (std::size_t s = 0; s < g.num_states(); ++s)
    chain.rows[s] = induced_row(g, mu.dist[s], tau.dist[s], s, scratch, touched);
  return chain;
}

// ---------------------------------------------------------------------------
// Policy text format

enum class policy_phase { none, reach, cycle };

/// Parses `policy v1`: lines `state action prob [reach|cycle]`, optionally
/// preceded by `owner controller|adversary`. Unlisted actions get 0.
inline mixed_policy parse_policy(const stochastic_game& g, std::string_view source,
                                 std::vector<policy_phase>* phases = nullptr) {
  mixed_policy mu{player::controller, {}};
  bool seen_header = false, seen_owner = false;
  std::vector<char> covered(g.num_states(), 0);
  std::vector<std::vector<double>> dist(g.num_states());
  if (phases) phases->assign(g.num_states(), policy_phase::none);
  for (auto& [lineno, line] : text::content_lines(source)) {
    auto w = text::words(line);
    std::string where = "line " + std::to_string(lineno) + ": ";
    if (!seen_header) {
      if (w != std::vector<std::string>{"policy", "v1"}) throw format_error(where + "expected header 'policy v1'");
      seen_header = true;
      continue;
    }
    if (w[0] == "owner" && w.size() == 2 && !seen_owner && !std::count(covered.begin(), covered.end(), 1)) {
      if (w[1] == "controller") mu.owner = player::controller;
      else if (w[1] == "adversary") mu.owner = player::adversary;
      else throw format_error(where + "owner must be controller or adversary");
      seen_owner = true;
      continue;
    }
    if (w.size() != 3 && w.size() != 4) throw format_error(where + "expected 'state action prob [reach|cycle]'");
    std::size_t s = g.find_state(w[0]);
    const auto& names = mu.owner == player::controller ? g.controller_actions(s) : g.adversary_actions(s);
    auto it = std::find(names.begin(), names.end(), w[1]);
    if (it == names.end()) throw format_error(where + "unknown action '" + w[1] + "' at '" + w[0] + "'");
    if (!covered[s]) dist[s].assign(names.size(), 0.0);
    covered[s] = 1;
    dist[s][static_cast<std::size_t>(it - names.begin())] += text::parse_double(w[2]);
    if (w.size() == 4) {
      policy_phase ph;
      if (w[3] == "reach") ph = policy_phase::reach;
      else if (w[3] == "cycle") ph = policy_phase::cycle;
      else throw format_error(where + "mode tag must be reach or cycle");
      if (phases) (*phases)[s] = ph;
    }
  }
  if (!seen_header) throw format_error("empty policy file");
  for (std::size_t s = 0; s < g.num_states(); ++s)
    if (!covered[s]) throw format_error("policy has no entry for state '" + g.state_name(s) + "'");
  mu.dist = std::move(dist);
  validate_policy(g, mu);
  return mu;
}

inline std::string write_policy(const stochastic_game& g, const mixed_policy& mu,
                                const std::vector<policy_phase>* phases = nullptr) {
  std::ostringstream out;
  out << "policy v1\nowner " << to_string(mu.owner) << '\n';
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    const auto& names = mu.owner == player::controller ? g.controller_actions(s) : g.adversary_actions(s);
    for (std::size_t u = 0; u < names.size(); ++u) {
      if (mu.dist[s][u] == 0.0) continue;
      out << g.state_name(s) << ' ' << names[u] << ' ' << text::format_double(mu.dist[s][u]);
      if (phases && (*phases)[s] != policy_phase::none) out << ((*phases)[s] == policy_phase::reach ? " reach" : " cycle");
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace sls
