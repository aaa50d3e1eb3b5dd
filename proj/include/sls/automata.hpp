#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sls/error.hpp"
#include "sls/ltl.hpp"
#include "sls/text.hpp"

namespace sls {

/// Bit i set iff proposition i of the owning alphabet holds.
using letter_mask = std::uint32_t;

inline constexpr std::size_t max_alphabet_size = 16;

/// Acceptance pair (L(z), K(z)) as state-membership flags.
struct rabin_pair {
  std::vector<char> L;
  std::vector<char> K;
};

/// Deterministic Rabin automaton over 2^alphabet with a total transition table.
class dra {
public:
  dra() = default;

  /// `next(q, m)` gives the successor table entry; the table has
  /// states.size() * 2^alphabet.size() entries and must be total.
  dra(std::vector<std::string> alphabet, std::vector<std::string> states, std::size_t initial,
      std::vector<std::size_t> table, std::vector<rabin_pair> pairs)
      : alphabet_(std::move(alphabet)),
        states_(std::move(states)),
        initial_(initial),
        table_(std::move(table)),
        pairs_(std::move(pairs)) {
    validate();
  }

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::string>& states() const { return states_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_letters() const { return std::size_t{1} << alphabet_.size(); }
  std::size_t initial() const { return initial_; }
  const std::vector<rabin_pair>& pairs() const { return pairs_; }

  std::size_t next(std::size_t q, letter_mask m) const { return table_[q * num_letters() + m]; }

  /// Index of a proposition, or alphabet().size() if absent.
  std::size_t proposition_index(std::string_view name) const {
    return static_cast<std::size_t>(std::find(alphabet_.begin(), alphabet_.end(), name) - alphabet_.begin());
  }

  letter_mask mask_of(const ltl::letter& l) const {
    letter_mask m = 0;
    for (const auto& p : l) {
      std::size_t i = proposition_index(p);
      if (i == alphabet_.size()) throw unknown_proposition("'" + p + "' is not in the automaton alphabet");
      m |= letter_mask{1} << i;
    }
    return m;
  }

  ltl::letter letter_of(letter_mask m) const {
    ltl::letter l;
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
      if (m >> i & 1u) l.insert(alphabet_[i]);
    return l;
  }

  std::size_t find_state(std::string_view name) const {
    auto it = std::find(states_.begin(), states_.end(), name);
    if (it == states_.end()) throw dangling_state("unknown automaton state '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - states_.begin());
  }

private:
  void validate() const {
    if (alphabet_.size() > max_alphabet_size) throw format_error("alphabet larger than 16 propositions");
    if (states_.empty()) throw format_error("automaton without states");
    if (initial_ >= states_.size()) throw dangling_state("initial state out of range");
    if (table_.size() != states_.size() * num_letters()) throw non_total_transition("transition table has wrong size");
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] >= states_.size()) {
        throw non_total_transition("no successor for state '" + states_[i / num_letters()] + "' on letter {" +
                                   text::join(letter_of(static_cast<letter_mask>(i % num_letters())), ",") + "}");
      }
    }
    if (pairs_.empty()) throw format_error("automaton needs at least one Rabin pair");
    for (const auto& p : pairs_)
      if (p.L.size() != states_.size() || p.K.size() != states_.size())
        throw dangling_state("Rabin pair sized for a different state set");
  }

  std::vector<std::string> alphabet_;
  std::vector<std::string> states_;
  std::size_t initial_ = 0;
  std::vector<std::size_t> table_;
  std::vector<rabin_pair> pairs_;
};

/// Table entry marking an unmapped (q, letter) during construction.
inline constexpr std::size_t no_successor = static_cast<std::size_t>(-1);

namespace detail {

inline std::vector<std::string> parse_set_literal(std::string_view tok) {
  if (tok.size() < 2 || tok.front() != '{' || tok.back() != '}')
    throw format_error("expected a set literal {...}, got '" + std::string(tok) + "'");
  std::vector<std::string> out;
  for (auto& item : text::split(tok.substr(1, tok.size() - 2), ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace detail

/// Parses the `dra v1` text format.
///
///     dra v1
///     alphabet a b
///     states q0 q1
///     initial q0
///     edges
///     q0 a q1          # guard: propositional formula over the alphabet
///     q0 !a q0
///     q1 {} q1         # or an explicit letter; several edges may cover a state
///     q1 {a} q1
///     pairs
///     1 L:{} K:{q1}
inline dra parse_dra(std::string_view source) {
  std::vector<std::string> alphabet, states;
  std::string initial_name;
  std::vector<std::string> edge_lines, pair_lines;
  enum class section { header, edges, pairs } where = section::header;
  bool seen_header = false;

  for (auto& [lineno, line] : text::content_lines(source)) {
    auto words = text::words(line);
    if (!seen_header) {
      if (words != std::vector<std::string>{"dra", "v1"})
        throw format_error("line " + std::to_string(lineno) + ": expected header 'dra v1'");
      seen_header = true;
      continue;
    }
    const std::string& key = words[0];
    if (key == "alphabet") {
      alphabet.assign(words.begin() + 1, words.end());
      where = section::header;
    } else if (key == "states") {
      states.assign(words.begin() + 1, words.end());
      where = section::header;
    } else if (key == "initial") {
      if (words.size() != 2) throw format_error("line " + std::to_string(lineno) + ": 'initial' takes one state");
      initial_name = words[1];
      where = section::header;
    } else if (key == "edges" && words.size() == 1) {
      where = section::edges;
    } else if (key == "pairs" && words.size() == 1) {
      where = section::pairs;
    } else if (where == section::edges) {
      edge_lines.push_back(line);
    } else if (where == section::pairs) {
      pair_lines.push_back(line);
    } else {
      throw format_error("line " + std::to_string(lineno) + ": unexpected '" + key + "'");
    }
  }
  if (!seen_header) throw format_error("empty automaton file");
  if (states.empty()) throw format_error("missing 'states'");
  if (initial_name.empty()) throw format_error("missing 'initial'");
  for (const auto& p : alphabet)
    if (!ltl::is_valid_atom_name(p)) throw format_error("invalid proposition name '" + p + "'");
  if (alphabet.size() > max_alphabet_size) throw format_error("alphabet larger than 16 propositions");
  {
    auto sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw format_error("duplicate proposition in alphabet");
    sorted = states;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw format_error("duplicate automaton state");
  }

  auto state_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) throw dangling_state("unknown automaton state '" + name + "'");
    return static_cast<std::size_t>(it - states.begin());
  };
  auto prop_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(alphabet.begin(), alphabet.end(), name);
    if (it == alphabet.end()) throw unknown_proposition("'" + name + "' is not in the automaton alphabet");
    return static_cast<std::size_t>(it - alphabet.begin());
  };

  const std::size_t letters = std::size_t{1} << alphabet.size();
  std::vector<std::size_t> table(states.size() * letters, no_successor);
  for (const auto& line : edge_lines) {
    auto words = text::words(line);
    if (words.size() < 3) throw format_error("edge needs 'source guard target': " + line);
    std::size_t from = state_index(words.front());
    std::size_t to = state_index(words.back());
    std::string guard_text;
    for (std::size_t i = 1; i + 1 < words.size(); ++i) guard_text += (i > 1 ? " " : "") + words[i];

    std::vector<letter_mask> matched;
    if (guard_text.front() == '{') {
      letter_mask m = 0;
      for (const auto& p : detail::parse_set_literal(guard_text)) m |= letter_mask{1} << prop_index(p);
      matched.push_back(m);
    } else {
      ltl::formula guard = ltl::parse_ltl(guard_text);
      if (!ltl::is_propositional(guard)) throw format_error("temporal operator in edge guard: " + guard_text);
      std::set<std::string> used;
      ltl::collect_atoms(guard, used);
      for (const auto& p : used) prop_index(p);
      for (std::size_t m = 0; m < letters; ++m) {
        ltl::letter l;
        for (std::size_t i = 0; i < alphabet.size(); ++i)
          if (m >> i & 1u) l.insert(alphabet[i]);
        if (ltl::holds(guard, l)) matched.push_back(static_cast<letter_mask>(m));
      }
    }
    for (letter_mask m : matched) {
      std::size_t& slot = table[from * letters + m];
      if (slot != no_successor && slot != to)
        throw format_error("conflicting edges from '" + states[from] + "' on one letter");
      slot = to;
    }
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] == no_successor) {
      ltl::letter l;
      for (std::size_t b = 0; b < alphabet.size(); ++b)
        if ((i % letters) >> b & 1u) l.insert(alphabet[b]);
      throw non_total_transition("no edge from '" + states[i / letters] + "' on {" + text::join(l, ",") + "}");
    }
  }

  std::vector<rabin_pair> pairs;
  for (const auto& line : pair_lines) {
    auto words = text::words(line);
    if (words.size() != 3 || words[1].rfind("L:", 0) != 0 || words[2].rfind("K:", 0) != 0)
      throw format_error("pair needs 'z L:{...} K:{...}': " + line);
    if (words[0] != std::to_string(pairs.size() + 1))
      throw format_error("pairs must be numbered 1, 2, ... in order: " + line);
    rabin_pair p{std::vector<char>(states.size(), 0), std::vector<char>(states.size(), 0)};
    for (const auto& q : detail::parse_set_literal(std::string_view(words[1]).substr(2))) p.L[state_index(q)] = 1;
    for (const auto& q : detail::parse_set_literal(std::string_view(words[2]).substr(2))) p.K[state_index(q)] = 1;
    pairs.push_back(std::move(p));
  }
  return dra(std::move(alphabet), std::move(states), state_index(initial_name), std::move(table), std::move(pairs));
}

inline dra load_dra(const std::string& path) { return parse_dra(text::read_file(path)); }

/// Serializes with one explicit-letter edge per (q, letter); parse_dra inverts it.
inline std::string write_dra(const dra& d) {
  std::ostringstream out;
  out << "dra v1\nalphabet";
  for (const auto& p : d.alphabet()) out << ' ' << p;
  out << "\nstates";
  for (const auto& q : d.states()) out << ' ' << q;
  out << "\ninitial " << d.states()[d.initial()] << "\nedges\n";
  for (std::size_t q = 0; q < d.num_states(); ++q)
    for (std::size_t m = 0; m < d.num_letters(); ++m)
      out << d.states()[q] << " {" << text::join(d.letter_of(static_cast<letter_mask>(m)), ",") << "} "
          << d.states()[d.next(q, static_cast<letter_mask>(m))] << '\n';
  out << "pairs\n";
  auto members = [&](const std::vector<char>& flags) {
    std::vector<std::string> names;
    for (std::size_t q = 0; q < flags.size(); ++q)
      if (flags[q]) names.push_back(d.states()[q]);
    return "{" + text::join(names, ",") + "}";
  };
  for (std::size_t z = 0; z < d.pairs().size(); ++z)
    out << z + 1 << " L:" << members(d.pairs()[z].L) << " K:" << members(d.pairs()[z].K) << '\n';
  return out.str();
}

/// True iff some pair z has no L(z) state and some K(z) state among the
/// automaton states visited infinitely often on prefix . cycle^omega.
inline bool accepts_lasso(const dra& d, const ltl::lasso_word& w) {
  if (w.cycle.empty()) throw format_error("lasso word needs a nonempty cycle");
  std::vector<letter_mask> letters;
  letters.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) letters.push_back(d.mask_of(w.at(i)));

  std::size_t q = d.initial();
  for (std::size_t i = 0; i < w.prefix.size(); ++i) q = d.next(q, letters[i]);

  // (q, cycle position) pairs repeat after at most |Q| * |cycle| steps.
  const std::size_t period = w.cycle.size();
  std::vector<std::size_t> first_seen(d.num_states() * period, no_successor);
  std::vector<std::size_t> run;
  std::size_t pos = 0;
  while (first_seen[q * period + pos] == no_successor) {
    first_seen[q * period + pos] = run.size();
    run.push_back(q);
    q = d.next(q, letters[w.prefix.size() + pos]);
    pos = (pos + 1) % period;
  }
  std::vector<char> inf(d.num_states(), 0);
  for (std::size_t i = first_seen[q * period + pos]; i < run.size(); ++i) inf[run[i]] = 1;

  for (const auto& p : d.pairs()) {
    bool hits_l = false, hits_k = false;
    for (std::size_t s = 0; s < d.num_states(); ++s) {
      if (!inf[s]) continue;
      hits_l = hits_l || p.L[s];
      hits_k = hits_k || p.K[s];
    }
    if (!hits_l && hits_k) return true;
  }
  return false;
}

}  // namespace sls
