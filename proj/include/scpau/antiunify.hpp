#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scpau/matching.hpp"
#include "scpau/normalize.hpp"
#include "scpau/term.hpp"
#include "scpau/theory.hpp"

namespace scpau {

enum class Rule { decompose, decompose_c, decompose_assoc, expand_unit, solve, recover, fail };

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::decompose: return "Decompose";
    case Rule::decompose_c: return "Decompose-C";
    case Rule::decompose_assoc: return "Decompose-Assoc";
    case Rule::expand_unit: return "Expand-Unit";
    case Rule::solve: return "Solve";
    case Rule::recover: return "Recover";
    case Rule::fail: return "Fail";
  }
  return "?";
}

/// Anti-unification triple x : left ≜ right.
struct AUT {
  VarId index = 0;
  Term left;
  Term right;

  std::size_t size() const { return left.size() + right.size(); }
};

struct Configuration {
  std::vector<AUT> active;
  std::vector<AUT> store;
  /// θ as the sequence of single bindings applied so far.
  std::vector<std::pair<VarId, Term>> bindings;
  VarId root = 0;
  VarId next_var = 1;
  /// x₀θ, kept up to date.
  Term generalization;

  Substitution theta() const {
    Substitution th;
    for (const auto& [x, t] : bindings) th = th.then(Substitution{{x, t}});
    return th;
  }

  Substitution left() const {
    Substitution out;
    for (const auto* set : {&active, &store}) {
      for (const AUT& a : *set) out.bind(a.index, a.left);
    }
    return out;
  }

  Substitution right() const {
    Substitution out;
    for (const auto* set : {&active, &store}) {
      for (const AUT& a : *set) out.bind(a.index, a.right);
    }
    return out;
  }
};

inline Configuration initial_config(const Term& s0, const Term& t0) {
  Configuration c;
  c.active.push_back({0, s0, t0});
  c.generalization = Term::var(0);
  return c;
}

using Measure = std::vector<std::size_t>;  // sorted ascending

inline Measure measure(const Configuration& c) {
  Measure m;
  for (const AUT& a : c.active) m.push_back(a.size());
  std::sort(m.begin(), m.end());
  return m;
}

/// Dershowitz-Manna order on finite multisets of naturals: m > n.
inline bool multiset_greater(Measure m, Measure n) {
  std::sort(m.begin(), m.end());
  std::sort(n.begin(), n.end());
  if (m == n) return false;
  Measure only_m, only_n;
  std::set_difference(m.begin(), m.end(), n.begin(), n.end(), std::back_inserter(only_m));
  std::set_difference(n.begin(), n.end(), m.begin(), m.end(), std::back_inserter(only_n));
  if (only_n.empty()) return true;
  if (only_m.empty()) return false;
  return only_m.back() > only_n.back();
}

/// Returns a description of the first violated structural invariant, if any:
/// Dom(Left) = Dom(Right) = Index(A ∪ S) = Var(x₀θ) and VRan(θ) = Var(x₀θ) \ {x₀}.
inline std::optional<std::string> invariant_violation(const Configuration& c) {
  const Substitution th = c.theta();
  const Term x0theta = th.apply(Term::var(c.root));
  if (!(x0theta == c.generalization)) return "cached x0θ differs from θ applied to x0";
  const std::vector<VarId> gen_vars = variables(x0theta);
  std::vector<VarId> index;
  for (const auto* set : {&c.active, &c.store}) {
    for (const AUT& a : *set) index.push_back(a.index);
  }
  std::sort(index.begin(), index.end());
  if (std::adjacent_find(index.begin(), index.end()) != index.end()) return "duplicate AUT index";
  if (index != gen_vars) return "Index(A ∪ S) differs from Var(x0θ)";
  if (c.left().domain() != index) return "Dom(Left) differs from Index(A ∪ S)";
  if (c.right().domain() != index) return "Dom(Right) differs from Index(A ∪ S)";
  std::vector<VarId> expected;
  for (VarId v : gen_vars) {
    if (v != c.root) expected.push_back(v);
  }
  if (th.variable_range() != expected) return "VRan(θ) differs from Var(x0θ) \\ {x0}";
  return std::nullopt;
}

/// Hooks for checking every explored step; all optional.
struct Observer {
  std::function<void(const Configuration&)> on_config;
  /// A derivation edge between configurations; `aut` is the index of the transformed AUT.
  std::function<void(Rule, const Configuration& from, const Configuration& to, VarId aut)> on_edge;
  /// A single-AUT step explored while deciding solvability of a subproblem.
  std::function<void(Rule, std::size_t parent, const std::vector<std::size_t>& children)> on_pair_step;
};

enum class Mode { first, all, maximal };

struct GenOptions {
  bool fail_rule = true;
  Mode mode = Mode::first;
  std::chrono::milliseconds timeout{60'000};
  std::size_t node_budget = 20'000'000;
  const Observer* observer = nullptr;
};

struct Generalization {
  Term term;
  Substitution left;
  Substitution right;
};

enum class GenStatus { solutions, failure, timeout };

inline const char* to_string(GenStatus s) {
  switch (s) {
    case GenStatus::solutions: return "solutions";
    case GenStatus::failure: return "failure";
    case GenStatus::timeout: return "timeout";
  }
  return "?";
}

struct GenStats {
  /// Configurations visited plus subproblems whose solvability was evaluated.
  std::size_t explored = 0;
  double millis = 0;
};

struct GenResult {
  GenStatus status = GenStatus::failure;
  std::vector<Generalization> solutions;
  std::vector<std::pair<Term, Term>> blocking;
  GenStats stats;
};

namespace detail {

/// One way of applying a decomposition-style rule to x : s ≜ t. The result binds x to
/// head(y₁, …, yₙ) and adds yᵢ : subs[i].
struct Alternative {
  Rule rule;
  Symbol head;
  std::vector<std::pair<Term, Term>> subs;
};

struct PairHash {
  std::size_t operator()(const std::pair<Term, Term>& p) const {
    return hash_combine(p.first.hash(), p.second.hash());
  }
};

struct Interrupted {};

inline bool same_head(const Term& s, const Term& t) {
  if (s.is_var() || t.is_var()) return s.is_var() && t.is_var() && s.var_id() == t.var_id();
  return s.symbol() == t.symbol();
}

class Engine {
 public:
  Engine(const Theory& e, const GenOptions& opts)
      : e_(e), opts_(opts), norm_(e), start_(std::chrono::steady_clock::now()) {}

  std::size_t explored() const { return explored_; }
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

  /// Receives alternatives in search order; returning true stops the enumeration.
  using Sink = std::function<bool(Alternative&&)>;

  /// Feeds the rule alternatives other than Solve/Recover/Fail to `sink`, lazily and in
  /// search order. Returns true iff the sink stopped the enumeration.
  bool for_each_alternative(const Term& s, const Term& t, const Sink& sink) {
    if (same_head(s, t)) {
      const Symbol f = s.symbol();
      const Attributes* attrs = e_.find(f);
      if (attrs && attrs->assoc) {
        return attrs->comm ? ac_splits(f, *attrs, s, t, sink) : a_splits(f, *attrs, s, t, sink);
      }
      Alternative plain{Rule::decompose, f, {}};
      for (std::size_t i = 0; i < s.arity(); ++i) plain.subs.emplace_back(s.child(i), t.child(i));
      if (attrs && attrs->comm) {
        plain.rule = Rule::decompose_c;
        if (sink(std::move(plain))) return true;
        return sink({Rule::decompose_c, f, {{s.child(0), t.child(1)}, {s.child(1), t.child(0)}}});
      }
      return sink(std::move(plain));
    }
    if (!s.is_var() && s.arity() == 2 && e_.unit_of(s.symbol()) && expansions(s, t, true, sink)) return true;
    if (!t.is_var() && t.arity() == 2 && e_.unit_of(t.symbol()) && expansions(t, s, false, sink)) return true;
    return false;
  }

  std::vector<Alternative> alternatives(const Term& s, const Term& t) {
    std::vector<Alternative> out;
    for_each_alternative(s, t, [&](Alternative&& a) {
      out.push_back(std::move(a));
      return false;
    });
    return out;
  }

  bool sc_mismatch(const Term& s, const Term& t) const {
    return opts_.fail_rule && s.special_constants() != t.special_constants();
  }

  /// Whether some derivation from {x : s ≜ t} reaches a solved configuration.
  bool solvable(const Term& s, const Term& t) {
    auto key = std::make_pair(s, t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    visit();
    bool ok = false;
    if (sc_mismatch(s, t)) {
      ok = false;
    } else if (s.special_constants().empty() && t.special_constants().empty()) {
      // Solve, or decomposition into special-constant-free parts, always succeeds.
      ok = true;
    } else {
      const std::size_t parent = s.size() + t.size();
      ok = for_each_alternative(s, t, [&](Alternative&& alt) {
        if (opts_.observer && opts_.observer->on_pair_step) {
          std::vector<std::size_t> kids;
          for (const auto& [a, b] : alt.subs) kids.push_back(a.size() + b.size());
          opts_.observer->on_pair_step(alt.rule, parent, kids);
        }
        for (const auto& [a, b] : alt.subs) {
          if (!solvable(a, b)) return false;
        }
        return true;
      });
    }
    memo_.emplace(std::move(key), ok);
    return ok;
  }

  /// Stuck subproblems reached by following the first alternative of every unsolvable pair.
  /// With E = ∅ these are exactly the failure conflict pairs.
  void diagnose(const Term& s, const Term& t, std::vector<std::pair<Term, Term>>& out) {
    if (solvable(s, t)) return;
    std::optional<Alternative> first;
    for_each_alternative(s, t, [&](Alternative&& a) {
      first = std::move(a);
      return true;
    });
    if (!first) {
      std::pair<Term, Term> p{s, t};
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
      return;
    }
    for (const auto& [a, b] : first->subs) diagnose(a, b, out);
  }

  void explore(const Configuration& c, std::vector<Generalization>& found) {
    if (stop_) return;
    visit();
    notify_config(c);
    if (c.active.empty()) {
      record(c, found);
      return;
    }
    if (opts_.fail_rule) {
      for (const AUT& a : c.active) {
        if (a.left.special_constants() != a.right.special_constants()) return;  // Bottom
      }
    }
    const AUT a = c.active.back();
    if (auto y = stored(c, a)) {
      Configuration next = without_last(c);
      bind(next, a.index, Term::var(*y));
      notify_edge(Rule::recover, c, next, a.index);
      explore(next, found);
      return;
    }
    bool any = false;
    for_each_alternative(a.left, a.right, [&](Alternative&& alt) {
      any = true;
      for (const auto& [l, r] : alt.subs) {
        if (!solvable(l, r)) return false;
      }
      Configuration next = without_last(c);
      std::vector<Term> vars;
      for (std::size_t i = 0; i < alt.subs.size(); ++i) vars.push_back(Term::var(next.next_var++));
      // Pushed in reverse so the leftmost subproblem is handled next.
      for (std::size_t i = alt.subs.size(); i-- > 0;) {
        next.active.push_back({vars[i].var_id(), alt.subs[i].first, alt.subs[i].second});
      }
      bind(next, a.index, Term::app(alt.head, std::move(vars)));
      notify_edge(alt.rule, c, next, a.index);
      explore(next, found);
      return stop_;
    });
    if (any) return;
    if (a.left.special_constants().empty() && a.right.special_constants().empty()) {
      Configuration next = without_last(c);
      next.store.push_back(a);
      notify_edge(Rule::solve, c, next, a.index);
      explore(next, found);
    }
    // Otherwise the configuration is final but unsolved.
  }

  Normalizer& normalizer() { return norm_; }

 private:
  void visit() {
    ++explored_;
    if (explored_ > opts_.node_budget) throw Interrupted{};
    if ((explored_ & 0xff) == 0 && std::chrono::steady_clock::now() - start_ > opts_.timeout) {
      throw Interrupted{};
    }
  }

  void work() {
    if ((++work_ & 0xfff) == 0 && std::chrono::steady_clock::now() - start_ > opts_.timeout) {
      throw Interrupted{};
    }
  }

  void notify_config(const Configuration& c) {
    if (opts_.observer && opts_.observer->on_config) opts_.observer->on_config(c);
  }

  void notify_edge(Rule r, const Configuration& from, const Configuration& to, VarId aut) {
    if (opts_.observer && opts_.observer->on_edge) opts_.observer->on_edge(r, from, to, aut);
  }

  static Configuration without_last(const Configuration& c) {
    Configuration next = c;
    next.active.pop_back();
    return next;
  }

  static void bind(Configuration& c, VarId x, const Term& t) {
    c.bindings.emplace_back(x, t);
    c.generalization = Substitution{{x, t}}.apply(c.generalization);
  }

  std::optional<VarId> stored(const Configuration& c, const AUT& a) {
    const Term l = norm_(a.left);
    const Term r = norm_(a.right);
    for (const AUT& s : c.store) {
      if (norm_(s.left) == l && norm_(s.right) == r) return s.index;
    }
    return std::nullopt;
  }

  void record(const Configuration& c, std::vector<Generalization>& found) {
    const std::vector<VarId> vars = variables(c.generalization);
    found.push_back({c.generalization, c.left().restricted_to(vars), c.right().restricted_to(vars)});
    if (opts_.mode == Mode::first) stop_ = true;
  }

  Term block(Symbol f, const Attributes& attrs, const std::vector<Term>& elems) {
    return build_spine(f, elems, attrs.unit);
  }

  SymbolSet sc_of(const std::vector<Term>& elems) { return special_constants(elems); }

  bool emit_split(Symbol f, const Attributes& attrs, const std::vector<Term>& l1, const std::vector<Term>& l2,
                  const std::vector<Term>& m1, const std::vector<Term>& m2, const Sink& sink) {
    return sink({Rule::decompose_assoc, f,
                 {{block(f, attrs, l1), block(f, attrs, m1)}, {block(f, attrs, l2), block(f, attrs, m2)}}});
  }

  /// Contiguous splits, smallest first blocks first.
  bool a_splits(Symbol f, const Attributes& attrs, const Term& s, const Term& t, const Sink& sink) {
    const std::vector<Term> ls = flatten_spine(s, f);
    const std::vector<Term> ms = flatten_spine(t, f);
    const std::size_t n = ls.size(), m = ms.size();
    struct Split {
      std::size_t i, j;
    };
    std::vector<Split> splits;
    const std::size_t lo = attrs.unit ? 0 : 1;
    for (std::size_t i = lo; i <= (attrs.unit ? n : n - 1); ++i) {
      for (std::size_t j = lo; j <= (attrs.unit ? m : m - 1); ++j) {
        if ((i == 0 && j == 0) || (i == n && j == m)) continue;
        splits.push_back({i, j});
      }
    }
    // Prefer splits whose cut lines up well-paired elements on both sides.
    auto mismatch = [&](const Split& p) {
      int out = 0;
      out += p.i == 0 || p.j == 0 ? 2 : pair_score(ls[p.i - 1], ms[p.j - 1]);
      out += p.i == n || p.j == m ? 2 : pair_score(ls[p.i], ms[p.j]);
      return out;
    };
    auto key = [&](const Split& p) {
      const std::size_t hi = std::max(p.i, p.j);
      const std::size_t diff = p.i > p.j ? p.i - p.j : p.j - p.i;
      return std::make_tuple(hi, mismatch(p), diff, p.j);
    };
    std::stable_sort(splits.begin(), splits.end(),
                     [&](const Split& a, const Split& b) { return key(a) < key(b); });
    for (const Split& p : splits) {
      work();
      std::vector<Term> l1(ls.begin(), ls.begin() + p.i), l2(ls.begin() + p.i, ls.end());
      std::vector<Term> m1(ms.begin(), ms.begin() + p.j), m2(ms.begin() + p.j, ms.end());
      if (opts_.fail_rule && (sc_of(l1) != sc_of(m1) || sc_of(l2) != sc_of(m2))) continue;
      if (emit_split(f, attrs, l1, l2, m1, m2, sink)) return true;
    }
    return false;
  }

  bool is_unit_constant(const Term& t) const {
    if (t.is_var() || t.arity() != 0) return false;
    for (const auto& [f, a] : e_.attributes()) {
      if (a.unit == t.symbol()) return true;
    }
    return false;
  }

  /// Equal compound heads first, then an argument against a unit constant, then the rest.
  int pair_score(const Term& a, const Term& b) const {
    if (same_head(a, b) && a.arity() > 0) return 0;
    const bool ua = is_unit_constant(a), ub = is_unit_constant(b);
    if (ua != ub) return 1;
    if (same_head(a, b)) return 2;
    return 3;
  }

  /// Calls fn(in) for every k-element subset of {0..n-1} in lexicographic order, skipping
  /// branches where an element may not go to the side it is put on. fn returns true to stop.
  template <typename Allowed, typename Fn>
  bool for_each_subset(std::size_t n, std::size_t k, Allowed&& allowed, Fn&& fn) {
    std::vector<bool> in(n, false);
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) -> bool {
      if (n - i < left) return false;
      if (i == n) return fn(in);
      work();
      if (left > 0 && allowed(i, true)) {
        in[i] = true;
        if (rec(i + 1, left - 1)) return true;
        in[i] = false;
      }
      if (allowed(i, false) && rec(i + 1, left)) return true;
      return false;
    };
    return rec(0, k);
  }

  /// Multiset splits. The first argument of s always goes to the first block; splits with
  /// small, balanced blocks come first, and among singleton pairs equal heads come first.
  bool ac_splits(Symbol f, const Attributes& attrs, const Term& s, const Term& t, const Sink& sink) {
    std::vector<Term> ls = flatten_spine(s, f);
    const std::vector<Term> ms = flatten_spine(t, f);
    const std::size_t n = ls.size(), m = ms.size();
    // The anchor (first block member) is the argument with the best available partner.
    std::size_t anchor = 0;
    int anchor_score = 4;
    for (std::size_t i = 0; i < n; ++i) {
      for (const Term& b : ms) {
        const int sc = pair_score(ls[i], b);
        if (sc < anchor_score) {
          anchor_score = sc;
          anchor = i;
        }
      }
    }
    std::rotate(ls.begin(), ls.begin() + static_cast<std::ptrdiff_t>(anchor), ls.begin() + static_cast<std::ptrdiff_t>(anchor) + 1);
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    for (std::size_t ca = 1; ca <= n; ++ca) {
      for (std::size_t cb = 0; cb <= m; ++cb) {
        if (!attrs.unit && (ca == n || cb == 0 || cb == m)) continue;
        if (ca == n && cb == m) continue;
        sizes.emplace_back(ca, cb);
      }
    }
    auto key = [](const std::pair<std::size_t, std::size_t>& p) {
      const auto [a, b] = p;
      return std::make_tuple(std::max(a, b), a > b ? a - b : b - a, a);
    };
    std::stable_sort(sizes.begin(), sizes.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });

    auto split_of = [](const std::vector<Term>& xs, const std::vector<bool>& in) {
      std::pair<std::vector<Term>, std::vector<Term>> out;
      for (std::size_t i = 0; i < xs.size(); ++i) (in[i] ? out.first : out.second).push_back(xs[i]);
      return out;
    };
    auto subset = [](const SymbolSet& a, const SymbolSet& b) {
      return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };

    for (const auto& [ca, cb] : sizes) {
      const bool stopped = for_each_subset(
          n, ca, [](std::size_t i, bool in) { return i != 0 || in; },
          [&](const std::vector<bool>& in_l) {
            auto [l1, l2] = split_of(ls, in_l);
            const SymbolSet sc1 = sc_of(l1), sc2 = sc_of(l2);
            auto right_allowed = [&](std::size_t j, bool in) {
              if (!opts_.fail_rule) return true;
              return subset(ms[j].special_constants(), in ? sc1 : sc2);
            };
            auto take = [&](const std::vector<bool>& in_r) {
              auto [m1, m2] = split_of(ms, in_r);
              if (opts_.fail_rule && (sc_of(m1) != sc1 || sc_of(m2) != sc2)) return false;
              return emit_split(f, attrs, l1, l2, m1, m2, sink);
            };
            if (ca == 1 && cb == 1) {
              std::vector<std::size_t> order;
              for (std::size_t j = 0; j < m; ++j) {
                if (right_allowed(j, true)) order.push_back(j);
              }
              std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return pair_score(ls[0], ms[x]) < pair_score(ls[0], ms[y]);
              });
              for (std::size_t j : order) {
                work();
                std::vector<bool> in_r(m, false);
                in_r[j] = true;
                if (take(in_r)) return true;
              }
              return false;
            }
            return for_each_subset(m, cb, right_allowed, take);
          });
      if (stopped) return true;
    }
    return false;
  }

  /// Expand-Unit fused with the decomposition it enables: w is read as f(u, w) or f(w, u) and
  /// aligned against a proper block of fw's arguments, the rest going against u.
  bool expansions(const Term& fw, const Term& w, bool f_on_left, const Sink& sink) {
    const Symbol f = fw.symbol();
    const Attributes& attrs = *e_.find(f);
    const Term u = Term::constant(*attrs.unit);
    auto orient = [&](const Term& side) {
      return f_on_left ? std::make_pair(side, w) : std::make_pair(w, side);
    };
    auto orient_unit = [&](const Term& side) {
      return f_on_left ? std::make_pair(side, u) : std::make_pair(u, side);
    };
    auto viable = [&](const std::vector<Term>& blk, const std::vector<Term>& rest) {
      return !opts_.fail_rule || (sc_of(blk) == w.special_constants() && sc_of(rest).empty());
    };
    auto make = [&](const std::vector<Term>& blk, const std::vector<Term>& rest, bool block_first) {
      const Term b = block(f, attrs, blk);
      const Term r = block(f, attrs, rest);
      return block_first ? Alternative{Rule::expand_unit, f, {orient(b), orient_unit(r)}}
                         : Alternative{Rule::expand_unit, f, {orient_unit(r), orient(b)}};
    };

    if (attrs.assoc && attrs.comm) {
      const std::vector<Term> ls = flatten_spine(fw, f);
      const std::size_t n = ls.size();
      // Single arguments with w's head first, then blocks by size.
      auto matches_w = [&](std::size_t i) { return same_head(ls[i], w); };
      for (std::size_t pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 1; k < n; ++k) {
          if (pass == 0 && k > 1) break;
          const bool stopped = for_each_subset(
              n, k,
              [&](std::size_t i, bool in) {
                return in || !opts_.fail_rule || ls[i].special_constants().empty();
              },
              [&](const std::vector<bool>& in) {
                std::vector<Term> blk, rest;
                std::size_t single = n;
                for (std::size_t i = 0; i < n; ++i) {
                  (in[i] ? blk : rest).push_back(ls[i]);
                  if (in[i]) single = i;
                }
                if (k == 1 && (pass == 0) != matches_w(single)) return false;
                if (!viable(blk, rest)) return false;
                return sink(make(blk, rest, true));
              });
          if (stopped) return true;
        }
      }
      return false;
    }

    // Few candidates: materialize, then put equal-head singletons first.
    std::vector<std::pair<int, Alternative>> found;
    auto emit = [&](const std::vector<Term>& blk, const std::vector<Term>& rest, bool block_first) {
      work();
      if (!viable(blk, rest)) return;
      const int score = blk.size() == 1 && same_head(blk.front(), w) ? 0 : 1;
      found.push_back({score, make(blk, rest, block_first)});
    };
    if (!attrs.assoc) {
      emit({fw.child(0)}, {fw.child(1)}, true);
      emit({fw.child(1)}, {fw.child(0)}, false);
    } else {
      const std::vector<Term> ls = flatten_spine(fw, f);
      const std::size_t n = ls.size();
      for (std::size_t len = 1; len < n; ++len) {
        emit({ls.begin(), ls.begin() + len}, {ls.begin() + len, ls.end()}, true);
        emit({ls.end() - len, ls.end()}, {ls.begin(), ls.end() - len}, false);
      }
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [score, alt] : found) {
      if (sink(std::move(alt))) return true;
    }
    return false;
  }

  const Theory& e_;
  GenOptions opts_;
  Normalizer norm_;
  std::chrono::steady_clock::time_point start_;
  std::unordered_map<std::pair<Term, Term>, bool, PairHash> memo_;
  std::size_t explored_ = 0;
  std::size_t work_ = 0;
  bool stop_ = false;
};

}  // namespace detail

/// One-step successors of c, applying the rule chosen for its last active AUT that admits one.
/// An empty optional means the Fail rule fired (Bottom).
inline std::optional<std::vector<std::pair<Rule, Configuration>>> successors(
    const Configuration& c, const Theory& e, bool fail_rule) {
  std::vector<std::pair<Rule, Configuration>> out;
  if (fail_rule) {
    for (const AUT& a : c.active) {
      if (a.left.special_constants() != a.right.special_constants()) return std::nullopt;
    }
  }
  GenOptions opts;
  opts.fail_rule = false;  // successors are listed in full; Fail is handled above
  detail::Engine engine(e, opts);
  Normalizer& norm = engine.normalizer();
  for (std::size_t k = c.active.size(); k-- > 0;) {
    const AUT a = c.active[k];
    Configuration base = c;
    base.active.erase(base.active.begin() + static_cast<std::ptrdiff_t>(k));
    auto bind = [](Configuration& cfg, VarId x, const Term& t) {
      cfg.bindings.emplace_back(x, t);
      cfg.generalization = Substitution{{x, t}}.apply(cfg.generalization);
    };
    for (const AUT& s : c.store) {
      if (norm(s.left) == norm(a.left) && norm(s.right) == norm(a.right)) {
        Configuration next = base;
        bind(next, a.index, Term::var(s.index));
        out.emplace_back(Rule::recover, std::move(next));
        return out;
      }
    }
    auto alts = engine.alternatives(a.left, a.right);
    if (!alts.empty()) {
      for (const auto& alt : alts) {
        Configuration next = base;
        std::vector<Term> vars;
        for (std::size_t i = 0; i < alt.subs.size(); ++i) vars.push_back(Term::var(next.next_var++));
        for (std::size_t i = alt.subs.size(); i-- > 0;) {
          next.active.push_back({vars[i].var_id(), alt.subs[i].first, alt.subs[i].second});
        }
        bind(next, a.index, Term::app(alt.head, std::move(vars)));
        out.emplace_back(alt.rule, std::move(next));
      }
      return out;
    }
    if (a.left.special_constants().empty() && a.right.special_constants().empty()) {
      Configuration next = base;
      next.store.push_back(a);
      out.emplace_back(Rule::solve, std::move(next));
      return out;
    }
  }
  return out;
}

namespace detail {

inline void keep_distinct(std::vector<Generalization>& sols, const Theory& e) {
  std::vector<Generalization> kept;
  for (Generalization& g : sols) {
    bool dup = false;
    for (const Generalization& k : kept) {
      try {
        if (renaming_equivalent_modulo(g.term, k.term, e)) {
          dup = true;
          break;
        }
      } catch (const Error&) {
        // Undecided within budget: keep both.
      }
    }
    if (!dup) kept.push_back(std::move(g));
  }
  sols = std::move(kept);
}

inline void keep_maximal(std::vector<Generalization>& sols, const Theory& e) {
  auto safe_subsumes = [&](const Term& a, const Term& b, bool fallback) {
    try {
      return subsumes(a, b, e);
    } catch (const Error&) {
      return fallback;
    }
  };
  std::vector<Generalization> kept;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < sols.size() && !dominated; ++j) {
      if (i == j) continue;
      // sols[j] strictly more specific than sols[i]; unknown never drops a candidate.
      dominated = safe_subsumes(sols[i].term, sols[j].term, false) &&
                  !safe_subsumes(sols[j].term, sols[i].term, true);
    }
    if (!dominated) kept.push_back(sols[i]);
  }
  sols = std::move(kept);
}

}  // namespace detail

/// Special-constant-preserving generalizations of ground s0 and t0 modulo e.
inline GenResult generalize(const Term& s0, const Term& t0, const Theory& e, const GenOptions& opts = {}) {
  if (!validate_sc_preserving(e)) {
    throw Error(ErrorKind::unsafe_theory, "theory may erase special constants");
  }
  if (!s0.is_ground() || !t0.is_ground()) {
    throw Error(ErrorKind::invalid_signature, "generalize expects ground terms");
  }
  GenResult result;
  detail::Engine engine(e, opts);
  std::optional<std::size_t> searched;
  try {
    if (!engine.solvable(s0, t0)) {
      result.status = GenStatus::failure;
      // Neither the observer walk nor the diagnosis below counts as search.
      searched = engine.explored();
      if (opts.observer) {
        // Still walk the root so observers see the initial configuration.
        std::vector<Generalization> none;
        engine.explore(initial_config(s0, t0), none);
      }
      try {
        engine.diagnose(s0, t0, result.blocking);
      } catch (const detail::Interrupted&) {
        // Out of budget while diagnosing: report the pairs found so far.
      }
    } else {
      engine.explore(initial_config(s0, t0), result.solutions);
      result.status = result.solutions.empty() ? GenStatus::failure : GenStatus::solutions;
    }
  } catch (const detail::Interrupted&) {
    result.status = GenStatus::timeout;
    result.solutions.clear();
  }
  if (result.status == GenStatus::solutions && opts.mode != Mode::first) {
    detail::keep_distinct(result.solutions, e);
    if (opts.mode == Mode::maximal) detail::keep_maximal(result.solutions, e);
  }
  result.stats.explored = searched.value_or(engine.explored());
  result.stats.millis = engine.elapsed_ms();
  return result;
}

}  // namespace scpau
