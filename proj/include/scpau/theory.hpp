#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scpau/signature.hpp"
#include "scpau/term.hpp"

namespace scpau {

struct Attributes {
  bool assoc = false;
  bool comm = false;
  std::optional<Symbol> unit;

  bool empty() const { return !assoc && !comm && !unit; }
  friend bool operator==(const Attributes&, const Attributes&) = default;
};

struct Equation {
  Term lhs;
  Term rhs;
};

/// Equational theory given by per-symbol attributes (A, C, unit) plus optional raw equations
/// that are only checked, never used for reasoning.
class Theory {
 public:
  Theory() = default;

  void set(Symbol f, Attributes attrs) {
    if ((attrs.assoc || attrs.comm || attrs.unit) && f.arity() != 2) {
      throw Error(ErrorKind::invalid_theory,
                  "attributes require a binary symbol, '" + f.name() + "' has arity " +
                      std::to_string(f.arity()));
    }
    if (attrs.unit && attrs.unit->kind() != SymbolKind::ordinary_constant) {
      throw Error(ErrorKind::invalid_theory,
                  "unit of '" + f.name() + "' must be an ordinary constant");
    }
    if (attrs.empty()) {
      attrs_.erase(f);
    } else {
      attrs_.insert_or_assign(f, std::move(attrs));
    }
  }

  void add_equation(Term lhs, Term rhs) { raw_.push_back({std::move(lhs), std::move(rhs)}); }

  const Attributes* find(Symbol f) const {
    auto it = attrs_.find(f);
    return it == attrs_.end() ? nullptr : &it->second;
  }

  bool is_assoc(Symbol f) const {
    const Attributes* a = find(f);
    return a && a->assoc;
  }
  bool is_comm(Symbol f) const {
    const Attributes* a = find(f);
    return a && a->comm;
  }
  std::optional<Symbol> unit_of(Symbol f) const {
    const Attributes* a = find(f);
    return a ? a->unit : std::nullopt;
  }

  bool empty() const { return attrs_.empty() && raw_.empty(); }
  bool syntactic() const { return attrs_.empty(); }
  const std::map<Symbol, Attributes>& attributes() const { return attrs_; }
  const std::vector<Equation>& raw_equations() const { return raw_; }

  /// The equations induced by the attributes, over variables 0, 1, 2.
  std::vector<Equation> attribute_equations() const {
    const Term x = Term::var(0), y = Term::var(1), z = Term::var(2);
    std::vector<Equation> out;
    for (const auto& [f, a] : attrs_) {
      if (a.assoc) {
        out.push_back({Term::app(f, {Term::app(f, {x, y}), z}),
                       Term::app(f, {x, Term::app(f, {y, z})})});
      }
      if (a.comm) out.push_back({Term::app(f, {x, y}), Term::app(f, {y, x})});
      if (a.unit) {
        const Term u = Term::constant(*a.unit);
        out.push_back({Term::app(f, {u, x}), x});
        out.push_back({Term::app(f, {x, u}), x});
      }
    }
    return out;
  }

 private:
  std::map<Symbol, Attributes> attrs_;
  std::vector<Equation> raw_;
};

/// seq, alt, par associative; alt, par commutative; 0 is the unit of seq and par.
inline Theory interactions_theory() {
  Theory e;
  e.set(isym::seq(), {.assoc = true, .comm = false, .unit = isym::empty()});
  e.set(isym::alt(), {.assoc = true, .comm = true, .unit = std::nullopt});
  e.set(isym::par(), {.assoc = true, .comm = true, .unit = isym::empty()});
  return e;
}

/// SC(l) = SC(r) and Var(l) = Var(r).
inline bool equation_is_sc_safe(const Equation& eq) {
  return eq.lhs.special_constants() == eq.rhs.special_constants() &&
         variables(eq.lhs) == variables(eq.rhs);
}

/// Sufficient syntactic check that E-equal terms carry the same special constants.
inline bool validate_sc_preserving(const Theory& e) {
  for (const Equation& eq : e.attribute_equations()) {
    if (!equation_is_sc_safe(eq)) return false;
  }
  for (const Equation& eq : e.raw_equations()) {
    if (!equation_is_sc_safe(eq)) return false;
  }
  return true;
}

}  // namespace scpau
