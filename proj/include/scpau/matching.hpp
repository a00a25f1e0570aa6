#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "scpau/normalize.hpp"
#include "scpau/term.hpp"
#include "scpau/theory.hpp"

namespace scpau {

struct MatchOptions {
  std::size_t node_budget = 1'000'000;
  bool first_only = false;
};

namespace detail {

/// Backtracking matcher over normalized patterns and normalized ground targets. Each
/// successful branch calls the continuation with the current bindings.
class Matcher {
 public:
  using Bindings = std::map<VarId, Term>;
  using Cont = std::function<void(Bindings&)>;

  Matcher(Normalizer& norm, MatchOptions opts) : norm_(norm), e_(norm.theory()), opts_(opts) {}

  std::vector<Substitution> run(const Term& pattern, const Term& target) {
    Bindings b;
    std::vector<Substitution> out;
    match(norm_(pattern), norm_(target), b, [&](Bindings& done) {
      Substitution s;
      for (const auto& [x, v] : done) s.bind(x, v);
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
      if (opts_.first_only) stop_ = true;
    });
    return out;
  }

 private:
  void tick() {
    if (++steps_ > opts_.node_budget) {
      throw Error(ErrorKind::resource_limit, "matching node budget exhausted");
    }
  }

  // Matches exactly one flattened argument.
  bool rigid(const Term& p) const {
    return p.is_ground() || (!p.is_var() && !e_.unit_of(p.symbol()));
  }

  void match(const Term& p, const Term& t, Bindings& b, const Cont& k) {
    if (stop_) return;
    tick();
    if (p.is_ground()) {
      if (p == t) k(b);
      return;
    }
    if (p.is_var()) {
      auto it = b.find(p.var_id());
      if (it != b.end()) {
        if (it->second == t) k(b);
        return;
      }
      b.emplace(p.var_id(), t);
      k(b);
      b.erase(p.var_id());
      return;
    }
    const Symbol f = p.symbol();
    const Attributes* attrs = e_.find(f);
    if (!attrs) {
      if (t.has_head(f)) match_args(p.children(), t.children(), 0, b, k);
      return;
    }
    if (attrs->assoc) {
      std::vector<Term> ps = flatten_spine(p, f);
      std::vector<Term> ts;
      if (t.has_head(f)) {
        ts = flatten_spine(t, f);
      } else if (!(attrs->unit && t == Term::constant(*attrs->unit))) {
        ts.push_back(t);
      }
      if (attrs->comm) {
        match_ac(f, *attrs, ps, ts, b, k);
      } else {
        match_a(f, *attrs, ps, ts, 0, 0, b, k);
      }
      return;
    }
    if (t.has_head(f)) {
      match_args(p.children(), t.children(), 0, b, k);
      if (attrs->comm) {
        const std::vector<Term> swapped{t.child(1), t.child(0)};
        match_args(p.children(), swapped, 0, b, k);
      }
    }
    if (attrs->unit) {
      const Term u = Term::constant(*attrs->unit);
      match_args(p.children(), std::vector<Term>{u, t}, 0, b, k);
      match_args(p.children(), std::vector<Term>{t, u}, 0, b, k);
    }
  }

  void match_args(const std::vector<Term>& ps, const std::vector<Term>& ts, std::size_t i,
                  Bindings& b, const Cont& k) {
    if (i == ps.size()) {
      k(b);
      return;
    }
    match(ps[i], ts[i], b, [&](Bindings& b2) { match_args(ps, ts, i + 1, b2, k); });
  }

  void match_a(Symbol f, const Attributes& attrs, const std::vector<Term>& ps,
               const std::vector<Term>& ts, std::size_t pi, std::size_t ti, Bindings& b,
               const Cont& k) {
    if (stop_) return;
    if (pi == ps.size()) {
      if (ti == ts.size()) k(b);
      return;
    }
    const std::size_t left = ts.size() - ti;
    std::size_t rest_min = 0;
    for (std::size_t q = pi + 1; q < ps.size(); ++q) rest_min += (attrs.unit && !rigid(ps[q])) ? 0 : 1;
    if (rest_min > left) return;
    const Term& p = ps[pi];
    const std::size_t lo = rigid(p) ? 1 : (attrs.unit ? 0 : 1);
    std::size_t hi = rigid(p) ? 1 : left - rest_min;
    hi = std::min(hi, left - rest_min);
    if (pi + 1 == ps.size()) {
      if (left < lo || left > hi) return;
      hi = left;
    }
    for (std::size_t len = (pi + 1 == ps.size() ? left : lo); len <= hi; ++len) {
      const Term block = build_spine(f, std::span(ts).subspan(ti, len), attrs.unit);
      match(p, block, b, [&](Bindings& b2) { match_a(f, attrs, ps, ts, pi + 1, ti + len, b2, k); });
    }
  }

  void match_ac(Symbol f, const Attributes& attrs, std::vector<Term> ps,
                const std::vector<Term>& ts, Bindings& b, const Cont& k) {
    // Rigid elements first, then collapsible applications, then variables.
    std::stable_sort(ps.begin(), ps.end(), [&](const Term& a, const Term& c) {
      auto rank = [&](const Term& x) { return x.is_var() ? 2 : (rigid(x) ? 0 : 1); };
      return rank(a) < rank(c);
    });
    std::vector<bool> used(ts.size(), false);
    ac_step(f, attrs, ps, ts, 0, used, b, k);
  }

  void ac_step(Symbol f, const Attributes& attrs, const std::vector<Term>& ps,
               const std::vector<Term>& ts, std::size_t pi, std::vector<bool>& used, Bindings& b,
               const Cont& k) {
    if (stop_) return;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (!used[j]) free.push_back(j);
    }
    if (pi == ps.size()) {
      if (free.empty()) k(b);
      return;
    }
    const Term& p = ps[pi];
    auto with = [&](const std::vector<std::size_t>& pick) {
      std::vector<Term> block;
      for (std::size_t j : pick) block.push_back(ts[j]);
      for (std::size_t j : pick) used[j] = true;
      match(p, build_spine(f, block, attrs.unit), b,
            [&](Bindings& b2) { ac_step(f, attrs, ps, ts, pi + 1, used, b2, k); });
      for (std::size_t j : pick) used[j] = false;
    };

    if (rigid(p)) {
      for (std::size_t n = 0; n < free.size(); ++n) {
        if (n > 0 && ts[free[n]] == ts[free[n - 1]]) continue;
        with({free[n]});
      }
      return;
    }
    if (p.is_var()) {
      if (auto it = b.find(p.var_id()); it != b.end()) {
        // Already bound: its elements are forced.
        std::vector<Term> need;
        if (it->second.has_head(f)) {
          need = flatten_spine(it->second, f);
        } else if (!(attrs.unit && it->second == Term::constant(*attrs.unit))) {
          need.push_back(it->second);
        }
        std::vector<std::size_t> pick;
        for (const Term& x : need) {
          bool found = false;
          for (std::size_t j : free) {
            if (ts[j] == x && std::find(pick.begin(), pick.end(), j) == pick.end()) {
              pick.push_back(j);
              found = true;
              break;
            }
          }
          if (!found) return;
        }
        std::sort(pick.begin(), pick.end());
        with(pick);
        return;
      }
    }
    const std::size_t min = attrs.unit ? 0 : 1;
    if (pi + 1 == ps.size()) {
      if (free.size() >= min) with(free);
      return;
    }
    if (free.size() > 24) throw Error(ErrorKind::resource_limit, "AC argument list too long");
    const std::uint32_t total = 1u << free.size();
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      if (stop_) return;
      std::vector<std::size_t> pick;
      for (std::size_t n = 0; n < free.size(); ++n) {
        if (mask & (1u << n)) pick.push_back(free[n]);
      }
      if (pick.size() < min) continue;
      tick();
      with(pick);
    }
  }

  Normalizer& norm_;
  const Theory& e_;
  MatchOptions opts_;
  std::size_t steps_ = 0;
  bool stop_ = false;
};

}  // namespace detail

/// All σ with pattern·σ =_E target, bindings given in normal form.
inline std::vector<Substitution> match_modulo(const Term& pattern, const Term& target,
                                              const Theory& e, MatchOptions opts = {}) {
  if (!target.is_ground()) throw Error(ErrorKind::invalid_signature, "match target must be ground");
  Normalizer norm(e);
  detail::Matcher m(norm, opts);
  return m.run(pattern, target);
}

inline Symbol frozen_marker(VarId v) { return Symbol::marker("?v" + std::to_string(v)); }

/// Replaces each variable by a distinct marker constant.
inline Term freeze(const Term& t) {
  Substitution s;
  for (VarId v : variables(t)) s.bind(v, Term::constant(frozen_marker(v)));
  return s.apply(t);
}

/// True iff r1·σ =_E r2 for some σ (r1 is at most as specific as r2).
inline bool subsumes(const Term& r1, const Term& r2, const Theory& e, std::size_t node_budget = 1'000'000) {
  return !match_modulo(r1, freeze(r2), e, {.node_budget = node_budget, .first_only = true}).empty();
}

/// True iff a bijective variable renaming turns a into a term =_E b.
inline bool renaming_equivalent_modulo(const Term& a, const Term& b, const Theory& e,
                                       std::size_t node_budget = 1'000'000) {
  if (e.syntactic()) return renaming_equivalent(a, b);
  const auto va = variables(a);
  const auto vb = variables(b);
  if (va.size() != vb.size()) return false;
  for (const Substitution& s : match_modulo(a, freeze(b), e, {.node_budget = node_budget})) {
    std::vector<Symbol> images;
    bool ok = s.size() == va.size();
    for (const auto& [x, t] : s) {
      if (!ok) break;
      ok = !t.is_var() && t.arity() == 0 && t.symbol().kind() == SymbolKind::variable_marker;
      if (ok) images.push_back(t.symbol());
    }
    if (!ok) continue;
    std::sort(images.begin(), images.end());
    if (std::adjacent_find(images.begin(), images.end()) == images.end()) return true;
  }
  return false;
}

}  // namespace scpau
