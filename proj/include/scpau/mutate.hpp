#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scpau/term.hpp"
#include "scpau/theory.hpp"

namespace scpau {

/// Positions of t whose head is commutative under e, in pre-order.
inline std::vector<Position> commutative_positions(const Term& t, const Theory& e) {
  std::vector<Position> out;
  for (const Position& p : positions(t)) {
    const Term& s = subterm_at(t, p);
    if (!s.is_var() && e.is_comm(s.symbol())) out.push_back(p);
  }
  return out;
}

/// Applies `count` argument swaps at uniformly chosen commutative positions.
inline Term mutate_commutative(const Term& t, const Theory& e, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Term cur = t;
  for (std::size_t n = 0; n < count; ++n) {
    // A swap moves subtrees, so eligible positions are recomputed each round.
    const std::vector<Position> eligible = commutative_positions(cur, e);
    if (eligible.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    const Position p = eligible[pick(rng)];
    const Term s = subterm_at(cur, p);
    cur = replace_at(cur, p, Term::app(s.symbol(), {s.child(1), s.child(0)}));
  }
  return cur;
}

}  // namespace scpau
