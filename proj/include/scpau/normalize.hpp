#pragma once

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <vector>

#include "scpau/term.hpp"
#include "scpau/theory.hpp"

namespace scpau {

/// Appends the maximal non-f subterms of t's f-spine, left to right.
inline void flatten_spine(const Term& t, Symbol f, std::vector<Term>& out) {
  if (t.has_head(f)) {
    for (const Term& c : t.children()) flatten_spine(c, f, out);
  } else {
    out.push_back(t);
  }
}

inline std::vector<Term> flatten_spine(const Term& t, Symbol f) {
  std::vector<Term> out;
  flatten_spine(t, f, out);
  return out;
}

/// Right-nested f-spine over elems; the unit when elems is empty.
inline Term build_spine(Symbol f, std::span<const Term> elems, std::optional<Symbol> unit) {
  if (elems.empty()) {
    if (!unit) throw Error(ErrorKind::invalid_theory, "empty block for '" + f.name() + "' without unit");
    return Term::constant(*unit);
  }
  Term acc = elems.back();
  for (std::size_t i = elems.size() - 1; i-- > 0;) acc = Term::app(f, {elems[i], acc});
  return acc;
}

/// Computes canonical representatives of =_E classes: associative spines flattened and
/// right-nested, units dropped, commutative arguments sorted by compare_terms.
class Normalizer {
 public:
  explicit Normalizer(const Theory& e) : e_(e) {}

  Term operator()(const Term& t) {
    if (e_.syntactic() || t.is_var() || t.arity() == 0) return t;
    if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    Term out = compute(t);
    cache_.emplace(t, out);
    return out;
  }

  const Theory& theory() const { return e_; }

 private:
  Term compute(const Term& t) {
    const Symbol f = t.symbol();
    const Attributes* attrs = e_.find(f);
    std::vector<Term> kids;
    kids.reserve(t.arity());
    for (const Term& c : t.children()) kids.push_back((*this)(c));
    if (!attrs) return Term::app(f, std::move(kids));

    const std::optional<Term> unit =
        attrs->unit ? std::optional<Term>(Term::constant(*attrs->unit)) : std::nullopt;
    if (attrs->assoc) {
      std::vector<Term> elems;
      for (const Term& k : kids) {
        if (k.has_head(f)) {
          flatten_spine(k, f, elems);
        } else {
          elems.push_back(k);
        }
      }
      if (unit) std::erase(elems, *unit);
      if (attrs->comm) std::sort(elems.begin(), elems.end(), TermLess{});
      return build_spine(f, elems, attrs->unit);
    }
    if (unit) {
      if (kids[0] == *unit) return kids[1];
      if (kids[1] == *unit) return kids[0];
    }
    if (attrs->comm && compare_terms(kids[1], kids[0]) < 0) std::swap(kids[0], kids[1]);
    return Term::app(f, std::move(kids));
  }

  const Theory& e_;
  std::unordered_map<Term, Term, TermHash> cache_;
};

inline Term normalize(const Term& t, const Theory& e) {
  Normalizer n(e);
  return n(t);
}

inline bool eq_modulo(const Term& a, const Term& b, const Theory& e) {
  Normalizer n(e);
  return n(a) == n(b);
}

}  // namespace scpau
