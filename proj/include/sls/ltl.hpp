#pragma once

#include <cctype>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sls/error.hpp"

/// Linear temporal logic: formula trees, a text parser/printer and an exact
/// evaluator over ultimately periodic (lasso) words.
namespace sls::ltl {

enum class op { truth, atom, negation, conjunction, disjunction, implies, next, until, eventually, always };

inline int arity(op o) {
  switch (o) {
    case op::truth:
    case op::atom: return 0;
    case op::negation:
    case op::next:
    case op::eventually:
    case op::always: return 1;
    default: return 2;
  }
}

inline bool is_reserved(std::string_view word) {
  return word == "X" || word == "U" || word == "F" || word == "G" || word == "true" || word == "false";
}

inline bool is_valid_atom_name(std::string_view name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !is_reserved(name);
}

/// Immutable formula tree; subterms are shared, never mutated.
class formula {
  struct node {
    op kind;
    std::string name;
    std::shared_ptr<const node> lhs, rhs;
  };

public:
  formula() : n_(std::make_shared<const node>(node{op::truth, {}, nullptr, nullptr})) {}

  static formula truth() { return formula(); }
  static formula falsity() { return negation(truth()); }
  static formula atom(std::string name) {
    if (!is_valid_atom_name(name)) throw format_error("invalid proposition name '" + name + "'");
    return make(op::atom, std::move(name), nullptr, nullptr);
  }
  static formula negation(const formula& f) { return make(op::negation, {}, f.n_, nullptr); }
  static formula next(const formula& f) { return make(op::next, {}, f.n_, nullptr); }
  static formula eventually(const formula& f) { return make(op::eventually, {}, f.n_, nullptr); }
  static formula always(const formula& f) { return make(op::always, {}, f.n_, nullptr); }
  static formula conjunction(const formula& a, const formula& b) { return make(op::conjunction, {}, a.n_, b.n_); }
  static formula disjunction(const formula& a, const formula& b) { return make(op::disjunction, {}, a.n_, b.n_); }
  static formula implies(const formula& a, const formula& b) { return make(op::implies, {}, a.n_, b.n_); }
  static formula until(const formula& a, const formula& b) { return make(op::until, {}, a.n_, b.n_); }

  op kind() const { return n_->kind; }
  const std::string& name() const { return n_->name; }
  formula lhs() const { return formula(n_->lhs); }
  formula rhs() const { return formula(n_->rhs); }

  /// Identity of the underlying node, usable as a memo key.
  const void* id() const { return n_.get(); }

  friend bool operator==(const formula& a, const formula& b) { return same(a.n_.get(), b.n_.get()); }

private:
  explicit formula(std::shared_ptr<const node> n) : n_(std::move(n)) {}

  static formula make(op k, std::string name, std::shared_ptr<const node> a, std::shared_ptr<const node> b) {
    return formula(std::make_shared<const node>(node{k, std::move(name), std::move(a), std::move(b)}));
  }

  static bool same(const node* a, const node* b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->name != b->name) return false;
    int n = arity(a->kind);
    if (n >= 1 && !same(a->lhs.get(), b->lhs.get())) return false;
    if (n == 2 && !same(a->rhs.get(), b->rhs.get())) return false;
    return true;
  }

  std::shared_ptr<const node> n_;
};

/// Fully parenthesized text form; parse_ltl(to_string(f)) == f.
inline std::string to_string(const formula& f) {
  switch (f.kind()) {
    case op::truth: return "true";
    case op::atom: return f.name();
    case op::negation: return "!" + to_string(f.lhs());
    case op::next: return "X " + to_string(f.lhs());
    case op::eventually: return "F " + to_string(f.lhs());
    case op::always: return "G " + to_string(f.lhs());
    case op::conjunction: return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
    case op::disjunction: return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
    case op::implies: return "(" + to_string(f.lhs()) + " -> " + to_string(f.rhs()) + ")";
    case op::until: return "(" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + ")";
  }
  return {};
}

namespace detail {

enum class tok { ident, bang, amp, bar, arrow, lparen, rparen, end };

struct token {
  tok kind;
  std::string text;
  std::size_t offset;
};

inline std::vector<token> tokenize(std::string_view text) {
  std::vector<token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({tok::ident, std::string(text.substr(i, j - i)), i});
      i = j;
      continue;
    }
    switch (c) {
      case '!': out.push_back({tok::bang, "!", i}); break;
      case '&': out.push_back({tok::amp, "&", i}); break;
      case '|': out.push_back({tok::bar, "|", i}); break;
      case '(': out.push_back({tok::lparen, "(", i}); break;
      case ')': out.push_back({tok::rparen, ")", i}); break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({tok::arrow, "->", i});
          ++i;
          break;
        }
        [[fallthrough]];
      default:
        throw unknown_token("illegal symbol '" + std::string(1, static_cast<char>(c)) + "' at offset " +
                            std::to_string(i));
    }
    ++i;
  }
  out.push_back({tok::end, "", text.size()});
  return out;
}

// implication < disjunction < conjunction < until < unary
class parser {
public:
  explicit parser(std::string_view text) : toks_(tokenize(text)) {}

  formula parse_all() {
    formula f = implication();
    if (peek().kind != tok::end) throw syntax_error(peek().offset, "unexpected '" + peek().text + "'");
    return f;
  }

private:
  const token& peek() const { return toks_[pos_]; }
  bool peek_ident(std::string_view word) const { return peek().kind == tok::ident && peek().text == word; }

  formula implication() {
    formula lhs = disjunction();
    if (peek().kind == tok::arrow) {
      ++pos_;
      return formula::implies(lhs, implication());
    }
    return lhs;
  }

  formula disjunction() {
    formula f = conjunction();
    while (peek().kind == tok::bar) {
      ++pos_;
      f = formula::disjunction(f, conjunction());
    }
    return f;
  }

  formula conjunction() {
    formula f = until();
    while (peek().kind == tok::amp) {
      ++pos_;
      f = formula::conjunction(f, until());
    }
    return f;
  }

  formula until() {
    formula lhs = unary();
    if (peek_ident("U")) {
      ++pos_;
      return formula::until(lhs, until());
    }
    return lhs;
  }

  formula unary() {
    const token& t = peek();
    if (t.kind == tok::bang) {
      ++pos_;
      return formula::negation(unary());
    }
    if (t.kind == tok::ident) {
      if (t.text == "X") return ++pos_, formula::next(unary());
      if (t.text == "F") return ++pos_, formula::eventually(unary());
      if (t.text == "G") return ++pos_, formula::always(unary());
    }
    return primary();
  }

  formula primary() {
    const token& t = peek();
    switch (t.kind) {
      case tok::lparen: {
        ++pos_;
        formula f = implication();
        if (peek().kind != tok::rparen) throw syntax_error(peek().offset, "expected ')'");
        ++pos_;
        return f;
      }
      case tok::ident:
        if (t.text == "true") return ++pos_, formula::truth();
        if (t.text == "false") return ++pos_, formula::falsity();
        if (t.text == "U") throw syntax_error(t.offset, "missing left operand of 'U'");
        ++pos_;
        return formula::atom(t.text);
      case tok::end: throw syntax_error(t.offset, "unexpected end of input");
      default: throw syntax_error(t.offset, "unexpected '" + t.text + "'");
    }
  }

  std::vector<token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses ASCII LTL: `! & | -> X U F G true false`, parentheses, identifiers.
/// The result keeps F, G and -> as nodes; see expand_derived().
inline formula parse_ltl(std::string_view text) { return detail::parser(text).parse_all(); }

/// Rewrites F, G and -> into the core grammar (true, atoms, !, &, |, X, U).
inline formula expand_derived(const formula& f) {
  switch (f.kind()) {
    case op::truth:
    case op::atom: return f;
    case op::negation: return formula::negation(expand_derived(f.lhs()));
    case op::next: return formula::next(expand_derived(f.lhs()));
    case op::conjunction: return formula::conjunction(expand_derived(f.lhs()), expand_derived(f.rhs()));
    case op::disjunction: return formula::disjunction(expand_derived(f.lhs()), expand_derived(f.rhs()));
    case op::until: return formula::until(expand_derived(f.lhs()), expand_derived(f.rhs()));
    case op::implies:
      return formula::disjunction(formula::negation(expand_derived(f.lhs())), expand_derived(f.rhs()));
    case op::eventually: return formula::until(formula::truth(), expand_derived(f.lhs()));
    case op::always:
      return formula::negation(formula::until(formula::truth(), formula::negation(expand_derived(f.lhs()))));
  }
  return f;
}

/// True when no temporal operator occurs.
inline bool is_propositional(const formula& f) {
  switch (f.kind()) {
    case op::truth:
    case op::atom: return true;
    case op::negation: return is_propositional(f.lhs());
    case op::conjunction:
    case op::disjunction:
    case op::implies: return is_propositional(f.lhs()) && is_propositional(f.rhs());
    default: return false;
  }
}

inline void collect_atoms(const formula& f, std::set<std::string>& out) {
  if (f.kind() == op::atom) out.insert(f.name());
  int n = arity(f.kind());
  if (n >= 1) collect_atoms(f.lhs(), out);
  if (n == 2) collect_atoms(f.rhs(), out);
}

using letter = std::set<std::string, std::less<>>;

/// Truth of a propositional formula on one letter.
inline bool holds(const formula& f, const letter& l) {
  switch (f.kind()) {
    case op::truth: return true;
    case op::atom: return l.count(f.name()) > 0;
    case op::negation: return !holds(f.lhs(), l);
    case op::conjunction: return holds(f.lhs(), l) && holds(f.rhs(), l);
    case op::disjunction: return holds(f.lhs(), l) || holds(f.rhs(), l);
    case op::implies: return !holds(f.lhs(), l) || holds(f.rhs(), l);
    default: throw format_error("temporal operator in propositional context: " + to_string(f));
  }
}

/// The infinite word prefix . cycle^omega.
struct lasso_word {
  std::vector<letter> prefix;
  std::vector<letter> cycle;

  std::size_t size() const { return prefix.size() + cycle.size(); }
  const letter& at(std::size_t i) const { return i < prefix.size() ? prefix[i] : cycle[i - prefix.size()]; }
  std::size_t successor(std::size_t i) const { return i + 1 < size() ? i + 1 : prefix.size(); }
};

namespace detail {

class lasso_evaluator {
public:
  explicit lasso_evaluator(const lasso_word& w) : w_(w) {
    if (w.cycle.empty()) throw format_error("lasso word needs a nonempty cycle");
  }

  // Truth table of f over the distinct positions 0..|prefix|+|cycle|-1;
  // position i's successor wraps from the end of the cycle to its start.
  const std::vector<char>& table(const formula& f) {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second.second;
    std::size_t n = w_.size();
    std::vector<char> t(n, 0);
    switch (f.kind()) {
      case op::truth: t.assign(n, 1); break;
      case op::atom:
        for (std::size_t i = 0; i < n; ++i) t[i] = w_.at(i).count(f.name()) ? 1 : 0;
        break;
      case op::negation: {
        const auto& a = table(f.lhs());
        for (std::size_t i = 0; i < n; ++i) t[i] = !a[i];
        break;
      }
      case op::conjunction:
      case op::disjunction:
      case op::implies: {
        const auto a = table(f.lhs());
        const auto& b = table(f.rhs());
        for (std::size_t i = 0; i < n; ++i) {
          if (f.kind() == op::conjunction) t[i] = a[i] && b[i];
          else if (f.kind() == op::disjunction) t[i] = a[i] || b[i];
          else t[i] = !a[i] || b[i];
        }
        break;
      }
      case op::next: {
        const auto& a = table(f.lhs());
        for (std::size_t i = 0; i < n; ++i) t[i] = a[w_.successor(i)];
        break;
      }
      case op::until:
      case op::eventually: {
        std::vector<char> hold(n, 1);
        if (f.kind() == op::until) hold = table(f.lhs());
        const auto& goal = table(f.kind() == op::until ? f.rhs() : f.lhs());
        least_fixpoint(t, hold, goal);
        break;
      }
      case op::always: {
        // G a = !(true U !a), computed directly as a greatest fixpoint.
        const auto& a = table(f.lhs());
        std::vector<char> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = !a[i];
        std::vector<char> ones(n, 1), ev(n, 0);
        least_fixpoint(ev, ones, neg);
        for (std::size_t i = 0; i < n; ++i) t[i] = !ev[i];
        break;
      }
    }
    auto& slot = memo_[f.id()];
    slot.first = f;  // keeps the node alive while its address is a key
    slot.second = std::move(t);
    return slot.second;
  }

private:
  // u(i) = goal(i) || (hold(i) && u(succ(i))), least solution.
  void least_fixpoint(std::vector<char>& u, const std::vector<char>& hold, const std::vector<char>& goal) const {
    std::size_t n = w_.size();
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = n; k-- > 0;) {
        char v = goal[k] || (hold[k] && u[w_.successor(k)]);
        if (v != u[k]) {
          u[k] = v;
          changed = true;
        }
      }
    }
  }

  const lasso_word& w_;
  std::unordered_map<const void*, std::pair<formula, std::vector<char>>> memo_;
};

}  // namespace detail

/// Exact truth of f on the lasso word w at position 0.
inline bool evaluate_on_lasso(const formula& f, const lasso_word& w) {
  detail::lasso_evaluator ev(w);
  return ev.table(f)[0] != 0;
}

}  // namespace sls::ltl
