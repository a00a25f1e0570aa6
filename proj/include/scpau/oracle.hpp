#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scpau/term.hpp"

namespace scpau {

/// Plain syntactic matching: σ with pattern·σ = target, if any.
inline std::optional<Substitution> syntactic_match(const Term& pattern, const Term& target) {
  std::map<VarId, Term> bound;
  std::function<bool(const Term&, const Term&)> go = [&](const Term& p, const Term& t) {
    if (p.is_var()) {
      auto [it, fresh] = bound.emplace(p.var_id(), t);
      return fresh || it->second == t;
    }
    if (t.is_var() || p.symbol() != t.symbol()) return false;
    for (std::size_t i = 0; i < p.arity(); ++i) {
      if (!go(p.child(i), t.child(i))) return false;
    }
    return true;
  };
  if (!go(pattern, target)) return std::nullopt;
  Substitution s;
  for (const auto& [x, v] : bound) s.bind(x, v);
  return s;
}

/// general ⪯ specific, treating the variables of specific as constants.
inline bool syntactic_instance(const Term& general, const Term& specific) {
  Substitution freeze;
  for (VarId v : variables(specific)) freeze.bind(v, Term::constant(Symbol::marker("?o" + std::to_string(v))));
  return syntactic_match(general, freeze.apply(specific)).has_value();
}

namespace detail {

/// Every set partition of {0, …, n-1}, as block labels.
inline void set_partitions(std::size_t n, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> label(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      out.push_back(label);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      label[i] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
}

/// A candidate with holes; holes[h] is the pair a hole stands for.
struct Skeleton {
  Term shape;  // holes are variables 0..n-1
  std::vector<std::pair<Term, Term>> holes;
};

}  // namespace detail

/// Brute-force CPG(s, t) under the empty theory: all r (up to renaming) with rσ_s = s,
/// rσ_t = t and no special constant in Ran(σ_s) ∪ Ran(σ_t), restricted to size ≤ max_size.
inline std::vector<Term> oracle_cpg(const Term& s, const Term& t, std::size_t max_size,
                                    std::size_t limit = 200'000) {
  if (!s.is_ground() || !t.is_ground()) throw Error(ErrorKind::invalid_signature, "oracle expects ground terms");
  std::size_t work = 0;
  auto charge = [&](std::size_t n) {
    work += n;
    if (work > limit) throw Error(ErrorKind::resource_limit, "oracle enumeration too large");
  };
  // All ways to cover the pair (a, b): a hole, or (same heads) the head over covers of children.
  std::function<std::vector<detail::Skeleton>(const Term&, const Term&)> cover =
      [&](const Term& a, const Term& b) {
        std::vector<detail::Skeleton> out;
        out.push_back({Term::var(0), {{a, b}}});
        if (a.symbol() != b.symbol()) return out;
        std::vector<detail::Skeleton> partial{{Term(), {}}};
        std::vector<std::vector<Term>> kids_of{{}};
        for (std::size_t i = 0; i < a.arity(); ++i) {
          const auto options = cover(a.child(i), b.child(i));
          std::vector<detail::Skeleton> next;
          std::vector<std::vector<Term>> next_kids;
          for (std::size_t p = 0; p < partial.size(); ++p) {
            for (const auto& o : options) {
              charge(1);
              Substitution shift;
              for (VarId v : variables(o.shape)) {
                shift.bind(v, Term::var(v + static_cast<VarId>(partial[p].holes.size())));
              }
              std::vector<Term> kids = kids_of[p];
              kids.push_back(shift.apply(o.shape));
              auto holes = partial[p].holes;
              holes.insert(holes.end(), o.holes.begin(), o.holes.end());
              next.push_back({Term(), std::move(holes)});
              next_kids.push_back(std::move(kids));
            }
          }
          partial = std::move(next);
          kids_of = std::move(next_kids);
        }
        for (std::size_t p = 0; p < partial.size(); ++p) {
          out.push_back({Term::app(a.symbol(), kids_of[p]), std::move(partial[p].holes)});
        }
        return out;
      };

  std::vector<Term> result;
  std::set<std::string> seen;
  auto key_of = [](const Term& r) {
    // Canonical spelling up to renaming.
    std::map<VarId, std::size_t> num;
    std::string out;
    std::function<void(const Term&)> go = [&](const Term& x) {
      if (x.is_var()) {
        auto [it, fresh] = num.emplace(x.var_id(), num.size());
        out += "?" + std::to_string(it->second);
        return;
      }
      out += x.symbol().name() + "/" + std::to_string(static_cast<int>(x.symbol().kind()));
      if (x.arity() == 0) return;
      out += "(";
      for (const Term& c : x.children()) {
        go(c);
        out += ",";
      }
      out += ")";
    };
    go(r);
    return out;
  };

  for (const detail::Skeleton& sk : cover(s, t)) {
    charge(1);
    const std::size_t n = sk.holes.size();
    // A variable standing for a special constant can never be witnessed.
    bool hopeless = false;
    for (const auto& [a, b] : sk.holes) hopeless = hopeless || !a.special_constants().empty() || !b.special_constants().empty();
    if (hopeless) continue;
    // Only holes over the same pair may share a variable; enumerate the sharing per group.
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t h = 0; h < n; ++h) {
      auto g = std::find_if(groups.begin(), groups.end(), [&](const auto& grp) { return sk.holes[grp.front()] == sk.holes[h]; });
      if (g == groups.end()) {
        groups.push_back({h});
      } else {
        g->push_back(h);
      }
    }
    std::vector<std::vector<std::vector<std::size_t>>> group_parts(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].size() > 8) throw Error(ErrorKind::resource_limit, "too many equal holes for the oracle");
      detail::set_partitions(groups[g].size(), group_parts[g]);
    }
    std::vector<std::size_t> pick(groups.size(), 0);
    while (true) {
      charge(1);
      Substitution fill;
      VarId next = 1000;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& label = group_parts[g][pick[g]];
        const std::size_t blocks = *std::max_element(label.begin(), label.end()) + 1;
        for (std::size_t m = 0; m < groups[g].size(); ++m) {
          fill.bind(static_cast<VarId>(groups[g][m]), Term::var(next + static_cast<VarId>(label[m])));
        }
        next += static_cast<VarId>(blocks);
      }
      const Term r = fill.apply(sk.shape);
      if (r.size() <= max_size) {
        auto ms = syntactic_match(r, s);
        auto mt = syntactic_match(r, t);
        if (ms && mt && ms->apply(r) == s && mt->apply(r) == t &&
            special_constants_of_range(*ms).empty() && special_constants_of_range(*mt).empty() &&
            seen.insert(key_of(r)).second) {
          result.push_back(r);
        }
      }
      std::size_t g = 0;
      while (g < groups.size() && ++pick[g] == group_parts[g].size()) pick[g++] = 0;
      if (g == groups.size()) break;
    }
  }
  return result;
}

/// Members with no strictly more specific member in the set.
inline std::vector<Term> maximal_elements(const std::vector<Term>& set) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < set.size() && !dominated; ++j) {
      if (i == j) continue;
      dominated = syntactic_instance(set[i], set[j]) && !syntactic_instance(set[j], set[i]);
    }
    if (!dominated) out.push_back(set[i]);
  }
  return out;
}

}  // namespace scpau
