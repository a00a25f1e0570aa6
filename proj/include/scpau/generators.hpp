#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scpau/interaction.hpp"
#include "scpau/term.hpp"

namespace scpau {

struct InteractionParams {
  std::size_t max_size = 20;
  std::vector<Lifeline> lifelines{"a", "b", "c", "d"};
  std::vector<std::string> messages{"m", "n", "o"};
  double loop_prob = 0.05;
  std::uint64_t seed = 0;
};

namespace detail {

class InteractionGen {
 public:
  explicit InteractionGen(const InteractionParams& p) : p_(p), rng_(p.seed) {}

  Term gen(std::size_t budget) {
    if (budget < 3 || coin(0.25)) return leaf();
    if (coin(p_.loop_prob)) return Term::app(isym::loop(), {gen(budget - 1)});
    const double r = unit();
    const Symbol op = r < 0.55 ? isym::seq() : (r < 0.8 ? isym::alt() : isym::par());
    const std::size_t inner = budget - 1;
    std::uniform_int_distribution<std::size_t> split(1, inner - 1);
    const std::size_t left = split(rng_);
    Term a = gen(left);
    Term b = gen(inner - left);
    return Term::app(op, {std::move(a), std::move(b)});
  }

 private:
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  bool coin(double p) { return unit() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

  Term leaf() {
    const double r = unit();
    if (p_.lifelines.empty() || r < 0.04) return empty_interaction();
    const Lifeline& l1 = pick(p_.lifelines);
    const std::string& m = pick(p_.messages);
    if (p_.lifelines.size() >= 2 && r < 0.75) {
      Lifeline l2 = l1;
      while (l2 == l1) l2 = pick(p_.lifelines);
      return vp(l1, m, l2);
    }
    return coin(0.5) ? emission(l1, m) : reception(l1, m);
  }

  InteractionParams p_;
  std::mt19937_64 rng_;
};

}  // namespace detail

/// A well-formed interaction of size at most params.max_size, deterministic per seed.
inline Term random_interaction(const InteractionParams& params) {
  if (params.max_size < 1) throw Error(ErrorKind::invalid_signature, "max_size must be positive");
  std::mt19937_64 rng(params.seed ^ 0x5eed);
  const std::size_t target = std::uniform_int_distribution<std::size_t>(1, params.max_size)(rng);
  detail::InteractionGen g(params);
  return g.gen(target);
}

struct PairParams {
  std::size_t max_size = 12;
  std::size_t specials = 3;
  std::uint64_t seed = 0;
};

/// Random ground pair over f/2, g/2, h/1, k/3, ordinary constants u, v, w and up to three
/// special constants. The second term is the first with some subterms replaced, so the
/// pair shares structure.
class PairGenerator {
 public:
  explicit PairGenerator(const PairParams& p) : p_(p), rng_(p.seed) {
    funcs_ = {Symbol::function("f", 2), Symbol::function("g", 2), Symbol::function("h", 1),
              Symbol::function("k", 3)};
    consts_ = {Symbol::constant("u"), Symbol::constant("v"), Symbol::constant("w")};
    const char* names[] = {"a", "b", "c"};
    for (std::size_t i = 0; i < std::min<std::size_t>(p.specials, 3); ++i) specials_.push_back(Symbol::special(names[i]));
  }

  std::pair<Term, Term> next() {
    const std::size_t size_s = range(1, p_.max_size);
    Term s = gen(size_s);
    Term t = s;
    const std::size_t edits = range(0, 3);
    for (std::size_t e = 0; e < edits; ++e) {
      const auto ps = positions(t);
      const Position& p = ps[range(0, ps.size() - 1)];
      const std::size_t room = p_.max_size - (t.size() - subterm_at(t, p).size());
      if (room == 0) continue;
      t = replace_at(t, p, gen(range(1, std::min<std::size_t>(room, 5))));
    }
    if (coin(0.5)) std::swap(s, t);
    return {s, t};
  }

 private:
  std::size_t range(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  Term gen(std::size_t budget) {
    std::vector<Symbol> fits;
    for (Symbol f : funcs_) {
      if (f.arity() + 1 <= budget) fits.push_back(f);
    }
    if (budget <= 1 || fits.empty() || coin(0.15)) {
      if (!specials_.empty() && coin(0.35)) return Term::constant(specials_[range(0, specials_.size() - 1)]);
      return Term::constant(consts_[range(0, consts_.size() - 1)]);
    }
    const Symbol f = fits[range(0, fits.size() - 1)];
    std::size_t left = budget - 1;
    std::vector<Term> kids;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      const std::size_t remaining_kids = f.arity() - i - 1;
      const std::size_t mine = i + 1 == f.arity() ? left : range(1, left - remaining_kids);
      kids.push_back(gen(mine));
      left -= mine;
    }
    return Term::app(f, std::move(kids));
  }

  PairParams p_;
  std::mt19937_64 rng_;
  std::vector<Symbol> funcs_;
  std::vector<Symbol> consts_;
  std::vector<Symbol> specials_;
};

}  // namespace scpau
