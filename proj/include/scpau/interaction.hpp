#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "scpau/antiunify.hpp"
#include "scpau/normalize.hpp"
#include "scpau/signature.hpp"
#include "scpau/term.hpp"
#include "scpau/theory.hpp"

namespace scpau {

using Lifeline = std::string;
using LifelineSet = std::set<Lifeline>;

struct Action {
  Lifeline lifeline;
  bool emission = true;
  std::string message;

  friend bool operator==(const Action&, const Action&) = default;
};

struct ValuePassing {
  Lifeline sender;
  std::string message;
  Lifeline receiver;

  friend bool operator==(const ValuePassing&, const ValuePassing&) = default;
};

using Atom = std::variant<Action, ValuePassing>;

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

namespace detail {

inline void require_identifier(std::string_view s, const char* what) {
  if (!is_identifier(s)) {
    throw Error(ErrorKind::syntax_error, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
}

}  // namespace detail

inline Term make_action(const Action& a) {
  detail::require_identifier(a.lifeline, "lifeline");
  detail::require_identifier(a.message, "message");
  return Term::constant(Symbol::constant(a.lifeline + (a.emission ? "!" : "?") + a.message));
}

inline Term emission(const Lifeline& l, const std::string& m) { return make_action({l, true, m}); }
inline Term reception(const Lifeline& l, const std::string& m) { return make_action({l, false, m}); }

inline Term make_vp(const ValuePassing& v) {
  detail::require_identifier(v.sender, "lifeline");
  detail::require_identifier(v.message, "message");
  detail::require_identifier(v.receiver, "lifeline");
  if (v.sender == v.receiver) {
    throw Error(ErrorKind::vp_self_loop, "value passing from '" + v.sender + "' to itself");
  }
  return Term::constant(Symbol::constant("vp(" + v.sender + ", " + v.message + ", " + v.receiver + ")"));
}

inline Term vp(const Lifeline& l1, const std::string& m, const Lifeline& l2) {
  return make_vp({l1, m, l2});
}

inline Term empty_interaction() { return Term::constant(isym::empty()); }

/// Decodes an action or value-passing constant; nullopt for anything else.
inline std::optional<Atom> decode_atom(const Term& t) {
  if (t.is_var() || t.arity() != 0 || t.symbol().kind() != SymbolKind::ordinary_constant) {
    return std::nullopt;
  }
  const std::string& n = t.symbol().name();
  if (n.starts_with("vp(") && n.ends_with(")")) {
    const std::string body = n.substr(3, n.size() - 4);
    const auto c1 = body.find(", ");
    const auto c2 = c1 == std::string::npos ? c1 : body.find(", ", c1 + 2);
    if (c2 == std::string::npos) return std::nullopt;
    return ValuePassing{body.substr(0, c1), body.substr(c1 + 2, c2 - c1 - 2), body.substr(c2 + 2)};
  }
  const auto k = n.find_first_of("!?");
  if (k == std::string::npos || k == 0 || k + 1 == n.size()) return std::nullopt;
  return Action{n.substr(0, k), n[k] == '!', n.substr(k + 1)};
}

inline std::optional<Action> decode_action(const Term& t) {
  auto a = decode_atom(t);
  if (a && std::holds_alternative<Action>(*a)) return std::get<Action>(*a);
  return std::nullopt;
}

/// θ(t): lifelines occurring in t. Gates and variables contribute nothing.
inline LifelineSet lifelines_of(const Term& t) {
  LifelineSet out;
  std::function<void(const Term&)> walk = [&](const Term& s) {
    if (s.is_var()) return;
    if (s.arity() == 0) {
      if (auto a = decode_atom(s)) {
        if (auto* act = std::get_if<Action>(&*a)) {
          out.insert(act->lifeline);
        } else {
          const auto& v = std::get<ValuePassing>(*a);
          out.insert(v.sender);
          out.insert(v.receiver);
        }
      }
      return;
    }
    for (const Term& c : s.children()) walk(c);
  };
  walk(t);
  return out;
}

/// π_L(t): keeps what happens on lifelines in L, splitting value passings that cross L.
inline Term project(const Term& t, const LifelineSet& lifelines) {
  if (t.is_var()) return t;
  if (t.arity() == 0) {
    auto a = decode_atom(t);
    if (!a) return t;
    if (auto* act = std::get_if<Action>(&*a)) {
      return lifelines.contains(act->lifeline) ? t : empty_interaction();
    }
    const auto& v = std::get<ValuePassing>(*a);
    const bool in1 = lifelines.contains(v.sender);
    const bool in2 = lifelines.contains(v.receiver);
    if (in1 && in2) return t;
    if (in1) return emission(v.sender, v.message);
    if (in2) return reception(v.receiver, v.message);
    return empty_interaction();
  }
  std::vector<Term> kids;
  kids.reserve(t.arity());
  for (const Term& c : t.children()) kids.push_back(project(c, lifelines));
  return Term::app(t.symbol(), std::move(kids));
}

// ---------------------------------------------------------------------------
// Taggings and gates

struct TagEntry {
  Position left;
  Position right;
  Symbol gate;

  friend bool operator==(const TagEntry&, const TagEntry&) = default;
};

struct Tagging {
  std::vector<TagEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t gate_count() const {
    std::set<Symbol> gates;
    for (const TagEntry& e : entries) gates.insert(e.gate);
    return gates.size();
  }
};

/// Partial map from gates to actions or value passings.
using GateMapping = std::map<Symbol, Term>;

inline Term apply_gate_mapping(const Term& t, const GateMapping& lambda) {
  if (t.is_var() || t.special_constants().empty()) return t;
  if (t.arity() == 0) {
    auto it = lambda.find(t.symbol());
    return it == lambda.end() ? t : it->second;
  }
  std::vector<Term> kids;
  for (const Term& c : t.children()) kids.push_back(apply_gate_mapping(c, lambda));
  return Term::app(t.symbol(), std::move(kids));
}

/// {a, b} = {l₁!m, l₂?m} with l₁ ≠ l₂.
inline bool compatible(const Term& a, const Term& b) {
  auto x = decode_action(a);
  auto y = decode_action(b);
  if (!x || !y) return false;
  return x->emission != y->emission && x->message == y->message && x->lifeline != y->lifeline;
}

inline void require_disjoint(const Term& i, const Term& j) {
  const LifelineSet li = lifelines_of(i);
  for (const Lifeline& l : lifelines_of(j)) {
    if (li.contains(l)) {
      throw Error(ErrorKind::disjointness_violation, "lifeline '" + l + "' occurs in both views");
    }
  }
}

inline bool validate_tagging(const Term& i, const Term& j, const Tagging& gamma) {
  require_disjoint(i, j);
  std::map<Symbol, std::pair<Term, Term>> by_gate;
  std::set<Position> seen_left, seen_right;
  for (const TagEntry& e : gamma.entries) {
    if (!e.gate.is_special()) return false;
    if (!is_valid_position(i, e.left) || !is_valid_position(j, e.right)) return false;
    if (!seen_left.insert(e.left).second || !seen_right.insert(e.right).second) return false;
    const Term& a = subterm_at(i, e.left);
    const Term& b = subterm_at(j, e.right);
    if (!compatible(a, b)) return false;
    auto [it, fresh] = by_gate.emplace(e.gate, std::make_pair(a, b));
    if (!fresh && !(it->second.first == a && it->second.second == b)) return false;
  }
  return true;
}

enum class Side { left, right };

struct Abstraction {
  Term term;
  GateMapping lambda;
};

/// Replaces each tagged position of one view by its gate.
inline Abstraction abstract_with_gates(const Term& view, Side side, const Tagging& gamma) {
  Abstraction out{view, {}};
  for (const TagEntry& e : gamma.entries) {
    const Position& p = side == Side::left ? e.left : e.right;
    out.lambda.emplace(e.gate, subterm_at(view, p));
    out.term = replace_at(out.term, p, Term::constant(e.gate));
  }
  return out;
}

struct DerivedViews {
  Term i;
  Term j;
  Tagging gamma;
};

/// Projects k onto both parts and tags every value passing that crosses the partition.
inline DerivedViews derive_tagging(const Term& k, const LifelineSet& part1, const LifelineSet& part2) {
  for (const Lifeline& l : part1) {
    if (part2.contains(l)) {
      throw Error(ErrorKind::partition_invalid, "lifeline '" + l + "' in both parts");
    }
  }
  for (const Lifeline& l : lifelines_of(k)) {
    if (!part1.contains(l) && !part2.contains(l)) {
      throw Error(ErrorKind::partition_invalid, "lifeline '" + l + "' in neither part");
    }
  }
  DerivedViews out{project(k, part1), project(k, part2), {}};
  std::map<std::tuple<Lifeline, std::string, Lifeline>, Symbol> gates;
  for (const Position& p : positions(k)) {
    const Term& s = subterm_at(k, p);
    if (s.is_var() || s.arity() != 0) continue;
    auto a = decode_atom(s);
    if (!a || !std::holds_alternative<ValuePassing>(*a)) continue;
    const auto& v = std::get<ValuePassing>(*a);
    const bool crossing = part1.contains(v.sender) != part1.contains(v.receiver);
    if (!crossing) continue;
    auto key = std::make_tuple(v.sender, v.message, v.receiver);
    auto it = gates.find(key);
    if (it == gates.end()) {
      it = gates.emplace(key, Symbol::special("g" + std::to_string(gates.size()))).first;
    }
    out.gamma.entries.push_back({p, p, it->second});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composition

struct ComposeOptions {
  GenOptions gen;
};

struct Composition {
  Term k;
  Term r;
  Term s;
  Term t;
  Substitution sigma_s;
  Substitution sigma_t;
  Substitution sigma_r;
  GateMapping lambda_k;
  GenStats stats;
};

namespace detail {

inline Term merge_gate(const Term& a, const Term& b) {
  auto x = decode_action(a);
  auto y = decode_action(b);
  if (!x || !y || !compatible(a, b)) {
    throw Error(ErrorKind::invalid_tagging, "gate binds incompatible actions");
  }
  const Action& snd = x->emission ? *x : *y;
  const Action& rcv = x->emission ? *y : *x;
  return vp(snd.lifeline, snd.message, rcv.lifeline);
}

/// Deterministic choice among several generalizations: larger first, then by normal form.
inline const Generalization& select_generalization(const std::vector<Generalization>& sols,
                                                   const Theory& e) {
  const Generalization* best = &sols.front();
  for (const Generalization& g : sols) {
    if (g.term.size() != best->term.size()) {
      if (g.term.size() > best->term.size()) best = &g;
      continue;
    }
    const Term a = normalize(freeze(g.term), e);
    const Term b = normalize(freeze(best->term), e);
    if (compare_terms(a, b) < 0) best = &g;
  }
  return *best;
}

}  // namespace detail

/// Builds k = rσ_rλ_k from a successful generalization of the abstracted views.
inline Composition build_composition(const GenResult& res, const Term& s, const GateMapping& lambda_i,
                                     const Term& t, const GateMapping& lambda_j, const Theory& e) {
  if (res.status == GenStatus::timeout) {
    throw Error(ErrorKind::timeout, "generalization did not finish in time");
  }
  if (res.status == GenStatus::failure) {
    throw Error(ErrorKind::no_composition, "views have no special-constant-preserving generalization");
  }
  const Generalization& g = detail::select_generalization(res.solutions, e);
  Composition out;
  out.r = g.term;
  out.s = s;
  out.t = t;
  out.sigma_s = g.left;
  out.sigma_t = g.right;
  out.stats = res.stats;
  for (VarId x : variables(g.term)) {
    const Term* a = g.left.find(x);
    const Term* b = g.right.find(x);
    out.sigma_r.bind(x, Term::app(isym::seq(), {a ? *a : Term::var(x), b ? *b : Term::var(x)}));
  }
  for (const auto& [gate, a] : lambda_i) {
    auto it = lambda_j.find(gate);
    if (it == lambda_j.end()) {
      throw Error(ErrorKind::invalid_tagging, "gate " + gate.name() + " bound on one side only");
    }
    out.lambda_k.emplace(gate, detail::merge_gate(a, it->second));
  }
  out.k = apply_gate_mapping(out.sigma_r.apply(g.term), out.lambda_k);
  return out;
}

/// Composes two gate-abstracted views into a global interaction.
inline Composition compose_abstracted(const Term& s, const GateMapping& lambda_i, const Term& t,
                                      const GateMapping& lambda_j, const Theory& e,
                                      const ComposeOptions& opts = {}) {
  return build_composition(generalize(s, t, e, opts.gen), s, lambda_i, t, lambda_j, e);
}

/// Composition of interactions i and j along the tagging γ.
inline Composition compose(const Term& i, const Term& j, const Tagging& gamma, const Theory& e,
                           const ComposeOptions& opts = {}) {
  if (!validate_tagging(i, j, gamma)) throw Error(ErrorKind::invalid_tagging, "tagging is not valid for these views");
  const Abstraction a = abstract_with_gates(i, Side::left, gamma);
  const Abstraction b = abstract_with_gates(j, Side::right, gamma);
  return compose_abstracted(a.term, a.lambda, b.term, b.lambda, e, opts);
}

/// π_θ(i)(k) =_E i and π_θ(j)(k) =_E j.
inline bool check_composition_sound(const Term& i, const Term& j, const Term& k, const Theory& e) {
  require_disjoint(i, j);
  Normalizer n(e);
  return n(project(k, lifelines_of(i))) == n(i) && n(project(k, lifelines_of(j))) == n(j);
}

}  // namespace scpau
