#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scpau/error.hpp"

namespace scpau {

enum class SymbolKind : std::uint8_t {
  ordinary_function,
  ordinary_constant,
  special_constant,
  // Arity-0 stand-in for a frozen variable (used when matching against non-ground targets).
  variable_marker,
};

namespace detail {

struct SymbolData {
  std::string name;
  std::size_t arity;
  SymbolKind kind;
  std::size_t hash;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

class SymbolTable {
 public:
  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }

  const SymbolData* intern(std::string_view name, std::size_t arity, SymbolKind kind) {
    std::string key;
    key.reserve(name.size() + 8);
    key.append(name);
    key.push_back('\0');
    key.append(std::to_string(arity));
    key.push_back(static_cast<char>('0' + static_cast<int>(kind)));
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    std::size_t h = std::hash<std::string_view>{}(name);
    h = hash_combine(h, arity);
    h = hash_combine(h, static_cast<std::size_t>(kind));
    storage_.push_back(SymbolData{std::string(name), arity, kind, h});
    const SymbolData* data = &storage_.back();
    index_.emplace(std::move(key), data);
    return data;
  }

 private:
  std::mutex mutex_;
  std::deque<SymbolData> storage_;
  std::unordered_map<std::string, const SymbolData*> index_;
};

}  // namespace detail

/// Interned function symbol. Copies are cheap; equality is identity of (name, arity, kind).
class Symbol {
 public:
  Symbol() = default;

  static Symbol make(std::string_view name, std::size_t arity, SymbolKind kind) {
    if (name.empty()) throw Error(ErrorKind::invalid_signature, "empty symbol name");
    const bool nullary = kind != SymbolKind::ordinary_function;
    if (nullary && arity != 0) {
      throw Error(ErrorKind::invalid_signature,
                  "constant symbol '" + std::string(name) + "' must have arity 0");
    }
    if (!nullary && arity == 0) {
      throw Error(ErrorKind::invalid_signature,
                  "function symbol '" + std::string(name) + "' must have positive arity");
    }
    return Symbol(detail::SymbolTable::instance().intern(name, arity, kind));
  }

  /// Ordinary symbol: a constant when arity is 0, a function otherwise.
  static Symbol function(std::string_view name, std::size_t arity) {
    return make(name, arity,
                arity == 0 ? SymbolKind::ordinary_constant : SymbolKind::ordinary_function);
  }
  static Symbol constant(std::string_view name) {
    return make(name, 0, SymbolKind::ordinary_constant);
  }
  /// Gate names always carry a leading '#', so they never collide with ordinary names.
  static Symbol special(std::string_view name) {
    if (!name.empty() && name.front() == '#') return make(name, 0, SymbolKind::special_constant);
    return make("#" + std::string(name), 0, SymbolKind::special_constant);
  }
  static Symbol marker(std::string_view name) {
    return make(name, 0, SymbolKind::variable_marker);
  }

  bool valid() const noexcept { return data_ != nullptr; }
  const std::string& name() const { return data_->name; }
  std::size_t arity() const { return data_->arity; }
  SymbolKind kind() const { return data_->kind; }
  std::size_t hash() const { return data_->hash; }
  bool is_special() const { return data_->kind == SymbolKind::special_constant; }

  friend bool operator==(Symbol a, Symbol b) noexcept { return a.data_ == b.data_; }

  /// Deterministic total order: name, then arity, then kind.
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.data_ == b.data_) return std::strong_ordering::equal;
    if (auto c = a.name().compare(b.name()); c != 0) {
      return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = a.arity() <=> b.arity(); c != 0) return c;
    return a.kind() <=> b.kind();
  }

 private:
  explicit Symbol(const detail::SymbolData* data) : data_(data) {}
  const detail::SymbolData* data_ = nullptr;
};

using VarId = std::uint32_t;
using SymbolSet = std::vector<Symbol>;  // sorted, duplicate-free

class Term;

namespace detail {

struct Node {
  bool is_var = false;
  VarId var = 0;
  Symbol symbol;
  std::vector<Term> children;
  std::size_t size = 1;
  std::size_t hash = 0;
  bool ground = true;
  SymbolSet special;
};

inline SymbolSet merge_sets(const SymbolSet& a, const SymbolSet& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  SymbolSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// Immutable first-order term with structural sharing. Equality is structural.
class Term {
 public:
  Term() = default;

  static Term var(VarId id) {
    auto node = std::make_shared<detail::Node>();
    node->is_var = true;
    node->var = id;
    node->ground = false;
    node->hash = detail::hash_combine(0x51ed270b27ULL, id);
    return Term(std::move(node));
  }

  static Term app(Symbol symbol, std::vector<Term> children = {}) {
    if (!symbol.valid()) throw Error(ErrorKind::invalid_signature, "null symbol");
    if (children.size() != symbol.arity()) {
      throw Error(ErrorKind::arity_mismatch,
                  "symbol '" + symbol.name() + "' expects " + std::to_string(symbol.arity()) +
                      " arguments, got " + std::to_string(children.size()));
    }
    auto node = std::make_shared<detail::Node>();
    node->symbol = symbol;
    std::size_t h = symbol.hash();
    for (const Term& c : children) {
      node->size += c.size();
      node->ground = node->ground && c.is_ground();
      h = detail::hash_combine(h, c.hash());
      node->special = detail::merge_sets(node->special, c.special_constants());
    }
    if (symbol.is_special()) node->special = {symbol};
    node->hash = h;
    node->children = std::move(children);
    return Term(std::move(node));
  }

  static Term constant(Symbol symbol) { return app(symbol); }

  bool valid() const noexcept { return node_ != nullptr; }
  bool is_var() const { return node_->is_var; }
  VarId var_id() const { return node_->var; }
  Symbol symbol() const { return node_->symbol; }
  const std::vector<Term>& children() const { return node_->children; }
  const Term& child(std::size_t i) const { return node_->children[i]; }
  std::size_t arity() const { return node_->children.size(); }
  std::size_t size() const { return node_->size; }
  std::size_t hash() const { return node_->hash; }
  bool is_ground() const { return node_->ground; }
  const SymbolSet& special_constants() const { return node_->special; }
  const void* identity() const { return node_.get(); }

  bool has_head(Symbol f) const { return !node_->is_var && node_->symbol == f; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.node_->size != b.node_->size) return false;
    if (a.node_->is_var != b.node_->is_var) return false;
    if (a.node_->is_var) return a.node_->var == b.node_->var;
    if (a.node_->symbol != b.node_->symbol) return false;
    for (std::size_t i = 0; i < a.node_->children.size(); ++i) {
      if (!(a.node_->children[i] == b.node_->children[i])) return false;
    }
    return true;
  }

 private:
  explicit Term(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

/// Fixed total order on terms: variables (by id) before applications; applications by head
/// symbol name, then arity, then children lexicographically.
inline std::strong_ordering compare_terms(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return std::strong_ordering::equal;
  if (a.is_var() != b.is_var()) {
    return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.is_var()) return a.var_id() <=> b.var_id();
  if (auto c = a.symbol() <=> b.symbol(); c != 0) return c;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (auto c = compare_terms(a.child(i), b.child(i)); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Positions

/// Path from the root; children are numbered from 1. The empty path is the root.
struct Position {
  std::vector<std::uint32_t> path;

  Position() = default;
  Position(std::initializer_list<std::uint32_t> p) : path(p) {}
  explicit Position(std::vector<std::uint32_t> p) : path(std::move(p)) {}

  bool is_root() const { return path.empty(); }
  std::size_t depth() const { return path.size(); }

  Position child(std::uint32_t i) const {
    Position p = *this;
    p.path.push_back(i);
    return p;
  }

  /// Strict prefix relation.
  bool is_strict_prefix_of(const Position& other) const {
    return path.size() < other.path.size() &&
           std::equal(path.begin(), path.end(), other.path.begin());
  }

  std::string to_string() const {
    if (path.empty()) return "eps";
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) out.push_back('.');
      out += std::to_string(path[i]);
    }
    return out;
  }

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

inline bool is_valid_position(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::uint32_t i : p.path) {
    if (cur->is_var() || i == 0 || i > cur->arity()) return false;
    cur = &cur->child(i - 1);
  }
  return true;
}

inline const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::uint32_t i : p.path) {
    if (cur->is_var() || i == 0 || i > cur->arity()) {
      throw Error(ErrorKind::invalid_position, "position " + p.to_string() + " not in term");
    }
    cur = &cur->child(i - 1);
  }
  return *cur;
}

/// Returns t with the subterm at p replaced by u.
inline Term replace_at(const Term& t, const Position& p, const Term& u, std::size_t from = 0) {
  if (from == p.path.size()) return u;
  const std::uint32_t i = p.path[from];
  if (t.is_var() || i == 0 || i > t.arity()) {
    throw Error(ErrorKind::invalid_position, "position " + p.to_string() + " not in term");
  }
  std::vector<Term> kids = t.children();
  kids[i - 1] = replace_at(kids[i - 1], p, u, from + 1);
  return Term::app(t.symbol(), std::move(kids));
}

/// All positions of t in pre-order.
inline std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  std::function<void(const Term&, Position&)> walk = [&](const Term& s, Position& p) {
    out.push_back(p);
    if (s.is_var()) return;
    for (std::uint32_t i = 0; i < s.arity(); ++i) {
      p.path.push_back(i + 1);
      walk(s.child(i), p);
      p.path.pop_back();
    }
  };
  Position root;
  walk(t, root);
  return out;
}

// ---------------------------------------------------------------------------
// Queries

inline void collect_variables(const Term& t, std::vector<VarId>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    out.push_back(t.var_id());
    return;
  }
  for (const Term& c : t.children()) collect_variables(c, out);
}

/// Var(t), sorted and duplicate-free.
inline std::vector<VarId> variables(const Term& t) {
  std::vector<VarId> out;
  collect_variables(t, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Variables in order of first occurrence (pre-order).
inline std::vector<VarId> variables_in_order(const Term& t) {
  std::vector<VarId> all;
  collect_variables(t, all);
  std::vector<VarId> out;
  for (VarId v : all) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

inline const SymbolSet& special_constants(const Term& t) { return t.special_constants(); }

inline SymbolSet special_constants(std::span<const Term> ts) {
  SymbolSet out;
  for (const Term& t : ts) out = detail::merge_sets(out, t.special_constants());
  return out;
}

/// Every function symbol occurring in t, sorted.
inline std::vector<Symbol> symbols_of(const Term& t) {
  std::vector<Symbol> out;
  std::function<void(const Term&)> walk = [&](const Term& s) {
    if (s.is_var()) return;
    out.push_back(s.symbol());
    for (const Term& c : s.children()) walk(c);
  };
  walk(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline VarId max_var_id(const Term& t) {
  VarId best = 0;
  std::vector<VarId> vs;
  collect_variables(t, vs);
  for (VarId v : vs) best = std::max(best, v);
  return best;
}

// ---------------------------------------------------------------------------
// Substitutions

class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const VarId, Term>> init) {
    for (const auto& [x, t] : init) bind(x, t);
  }

  /// Adds or replaces a binding. Identity bindings are not stored.
  void bind(VarId x, Term t) {
    if (t.is_var() && t.var_id() == x) {
      map_.erase(x);
      return;
    }
    map_.insert_or_assign(x, std::move(t));
  }

  const Term* find(VarId x) const {
    auto it = map_.find(x);
    return it == map_.end() ? nullptr : &it->second;
  }

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  std::vector<VarId> domain() const {
    std::vector<VarId> out;
    for (const auto& [x, _] : map_) out.push_back(x);
    return out;
  }

  std::vector<Term> range() const {
    std::vector<Term> out;
    for (const auto& [_, t] : map_) out.push_back(t);
    return out;
  }

  std::vector<VarId> variable_range() const {
    std::vector<VarId> out;
    for (const auto& [_, t] : map_) collect_variables(t, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Term apply(const Term& t) const {
    if (map_.empty() || t.is_ground()) return t;
    if (t.is_var()) {
      const Term* b = find(t.var_id());
      return b ? *b : t;
    }
    std::vector<Term> kids;
    kids.reserve(t.arity());
    bool changed = false;
    for (const Term& c : t.children()) {
      kids.push_back(apply(c));
      changed = changed || kids.back().identity() != c.identity();
    }
    return changed ? Term::app(t.symbol(), std::move(kids)) : t;
  }

  /// this·other, i.e. t(this·other) = (t this) other.
  Substitution then(const Substitution& other) const {
    Substitution out;
    for (const auto& [x, t] : map_) out.bind(x, other.apply(t));
    for (const auto& [x, t] : other.map_) {
      if (!map_.contains(x)) out.bind(x, t);
    }
    return out;
  }

  /// Keeps only bindings whose variable is in vars (sorted).
  Substitution restricted_to(std::span<const VarId> vars) const {
    Substitution out;
    for (const auto& [x, t] : map_) {
      if (std::binary_search(vars.begin(), vars.end(), x)) out.bind(x, t);
    }
    return out;
  }

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.map_ == b.map_;
  }

 private:
  std::map<VarId, Term> map_;
};

inline Term apply_substitution(const Term& t, const Substitution& sigma) {
  return sigma.apply(t);
}

/// Special constants occurring in Ran(sigma).
inline SymbolSet special_constants_of_range(const Substitution& sigma) {
  SymbolSet out;
  for (const auto& [_, t] : sigma) out = detail::merge_sets(out, t.special_constants());
  return out;
}

// ---------------------------------------------------------------------------
// Conflict positions

struct ConflictReport {
  std::vector<Position> solvable;
  std::vector<Position> failure;
};

/// Common positions where the heads first disagree, split by whether either side carries a
/// special constant.
inline ConflictReport conflict_positions(const Term& s, const Term& t) {
  ConflictReport report;
  std::function<void(const Term&, const Term&, Position&)> walk =
      [&](const Term& a, const Term& b, Position& p) {
        const bool same_head = (a.is_var() && b.is_var() && a.var_id() == b.var_id()) ||
                               (!a.is_var() && !b.is_var() && a.symbol() == b.symbol());
        if (!same_head) {
          if (a.special_constants().empty() && b.special_constants().empty()) {
            report.solvable.push_back(p);
          } else {
            report.failure.push_back(p);
          }
          return;
        }
        if (a.is_var()) return;
        for (std::uint32_t i = 0; i < a.arity(); ++i) {
          p.path.push_back(i + 1);
          walk(a.child(i), b.child(i), p);
          p.path.pop_back();
        }
      };
  Position root;
  walk(s, t, root);
  return report;
}

// ---------------------------------------------------------------------------
// Renaming

/// True iff a bijective variable renaming maps a onto b.
inline bool renaming_equivalent(const Term& a, const Term& b) {
  std::unordered_map<VarId, VarId> fwd;
  std::unordered_map<VarId, VarId> bwd;
  std::function<bool(const Term&, const Term&)> walk = [&](const Term& x, const Term& y) {
    if (x.size() != y.size() || x.is_var() != y.is_var()) return false;
    if (x.is_var()) {
      auto [fi, fnew] = fwd.emplace(x.var_id(), y.var_id());
      auto [bi, bnew] = bwd.emplace(y.var_id(), x.var_id());
      return fi->second == y.var_id() && bi->second == x.var_id();
    }
    if (x.symbol() != y.symbol()) return false;
    for (std::size_t i = 0; i < x.arity(); ++i) {
      if (!walk(x.child(i), y.child(i))) return false;
    }
    return true;
  };
  return walk(a, b);
}

/// Renames variables to 0, 1, 2, ... in order of first occurrence.
inline Substitution canonical_renaming(const Term& t, VarId first = 0) {
  Substitution out;
  VarId next = first;
  for (VarId v : variables_in_order(t)) out.bind(v, Term::var(next++));
  return out;
}

}  // namespace scpau

template <>
struct std::hash<scpau::Symbol> {
  std::size_t operator()(scpau::Symbol s) const noexcept { return s.valid() ? s.hash() : 0; }
};
