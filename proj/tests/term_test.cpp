#include <gtest/gtest.h>

#include <random>

#include "scpau/scpau.hpp"

using namespace scpau;

namespace {

Term T(const char* text) { return parse_term(text); }
Term I(const char* text) { return parse_interaction(text); }

Position P(std::initializer_list<std::uint32_t> p) { return Position{std::vector<std::uint32_t>(p)}; }

// Independent size count by walking the rendered text: one node per symbol or variable token.
std::size_t token_count(const std::string& s) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : s) {
    const bool tok = c != '(' && c != ')' && c != ',' && c != ' ';
    if (tok && !in_token) ++n;
    in_token = tok;
  }
  return n;
}

}  // namespace

TEST(Symbol, InternedAndOrdered) {
  EXPECT_EQ(Symbol::function("f", 2), Symbol::function("f", 2));
  EXPECT_NE(Symbol::function("f", 2), Symbol::function("f", 1));
  EXPECT_TRUE(Symbol::special("a").is_special());
  EXPECT_EQ(Symbol::special("a").name(), "#a");
  EXPECT_LT(Symbol::constant("a"), Symbol::constant("b"));
}

TEST(Term, ArityChecked) {
  EXPECT_THROW(Term::app(Symbol::function("f", 2), {T("u")}), Error);
}

TEST(Term, SizeMatchesTokenCount) {
  for (const char* s : {"u", "f(#a, g(u, u))", "k(u, h(v), f(?x, ?x))", "seq(seq(?x, #a), alt(seq(#b, #c), ?y))"}) {
    const Term t = T(s);
    EXPECT_EQ(t.size(), token_count(s)) << s;
  }
}

TEST(Term, SubtermAt) {
  const Term t = I("seq(seq(vp(dc, dia, ss), #a), alt(seq(#b, #c), 0))");
  EXPECT_EQ(subterm_at(t, P({1, 2})), Term::constant(Symbol::special("a")));
  EXPECT_EQ(subterm_at(t, Position{}), t);
  EXPECT_THROW(subterm_at(Term::constant(Symbol::special("a")), P({1})), Error);
  try {
    subterm_at(T("#a"), P({1}));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_position);
  }
}

TEST(Term, PositionsArePreorderAndValid) {
  const Term t = T("f(g(u, v), h(w))");
  const auto ps = positions(t);
  ASSERT_EQ(ps.size(), t.size());
  EXPECT_TRUE(ps.front().is_root());
  EXPECT_EQ(ps[1], P({1}));
  EXPECT_EQ(ps[2], P({1, 1}));
  for (const Position& p : ps) EXPECT_TRUE(is_valid_position(t, p));
  EXPECT_FALSE(is_valid_position(t, P({3})));
  EXPECT_EQ(P({1, 2, 1}).to_string(), "1.2.1");
  EXPECT_EQ(Position{}.to_string(), "eps");
}

TEST(Term, ReplaceAt) {
  const Term t = T("f(g(u, v), h(w))");
  EXPECT_EQ(replace_at(t, P({1, 2}), T("#a")), T("f(g(u, #a), h(w))"));
  EXPECT_EQ(replace_at(t, Position{}, T("u")), T("u"));
}

TEST(Substitution, ApplyAndCompose) {
  const Term x0 = Term::var(0);
  Substitution s1{{0, T("f(?x1, ?x2)")}};
  Substitution s2{{1, T("#a")}};
  EXPECT_EQ(s1.then(s2).apply(x0), T("f(#a, ?x2)"));
  EXPECT_EQ(Substitution{}.apply(T("f(?x1, u)")), T("f(?x1, u)"));

  const Term r = I("seq(seq(?x, #a), alt(seq(#b, #c), ?y))");
  const auto vars = variables_in_order(r);
  ASSERT_EQ(vars.size(), 2u);
  Substitution sig;
  sig.bind(vars[0], empty_interaction());
  sig.bind(vars[1], emission("tc", "wrn"));
  EXPECT_EQ(sig.apply(r), I("seq(seq(0, #a), alt(seq(#b, #c), tc!wrn))"));
}

TEST(Substitution, IdentityBindingDropped) {
  Substitution s;
  s.bind(3, Term::var(3));
  EXPECT_TRUE(s.empty());
}

TEST(Term, SpecialConstants) {
  EXPECT_EQ(T("f(#a, g(#b, u))").special_constants(), (SymbolSet{Symbol::special("a"), Symbol::special("b")}));
  EXPECT_TRUE(T("g(u, v)").special_constants().empty());
  EXPECT_EQ(I("seq(seq(?x, #a), alt(seq(#b, #c), ?y))").special_constants().size(), 3u);
}

namespace {

// Conflict positions by direct enumeration of common positions.
std::pair<std::set<Position>, std::set<Position>> enumerate_conflicts(const Term& s, const Term& t) {
  std::set<Position> solvable, failure;
  for (const Position& p : positions(s)) {
    if (!is_valid_position(t, p)) continue;
    bool above_ok = true;
    for (std::size_t d = 0; d < p.depth(); ++d) {
      Position q{std::vector<std::uint32_t>(p.path.begin(), p.path.begin() + static_cast<std::ptrdiff_t>(d))};
      const Term& a = subterm_at(s, q);
      const Term& b = subterm_at(t, q);
      above_ok = above_ok && a.symbol() == b.symbol();
    }
    if (!above_ok) continue;
    const Term& a = subterm_at(s, p);
    const Term& b = subterm_at(t, p);
    if (a.symbol() == b.symbol()) continue;
    const bool clash = !a.special_constants().empty() || !b.special_constants().empty();
    (clash ? failure : solvable).insert(p);
  }
  return {solvable, failure};
}

}  // namespace

TEST(ConflictPositions, PaperPairs) {
  auto r = conflict_positions(T("f(#a, g(#b, u))"), T("f(#a, g(v, #b))"));
  EXPECT_TRUE(r.solvable.empty());
  EXPECT_EQ(std::set<Position>(r.failure.begin(), r.failure.end()), (std::set<Position>{P({2, 1}), P({2, 2})}));
  r = conflict_positions(T("f(#a, g(u, u))"), T("f(#a, g(v, v))"));
  EXPECT_EQ(std::set<Position>(r.solvable.begin(), r.solvable.end()), (std::set<Position>{P({2, 1}), P({2, 2})}));
  EXPECT_TRUE(r.failure.empty());
  r = conflict_positions(T("f(#a, u)"), T("f(#a, u)"));
  EXPECT_TRUE(r.solvable.empty() && r.failure.empty());
}

TEST(ConflictPositions, AgreesWithEnumeration) {
  PairGenerator gen({.max_size = 12, .specials = 3, .seed = 11});
  for (int n = 0; n < 300; ++n) {
    auto [s, t] = gen.next();
    const auto r = conflict_positions(s, t);
    const auto [sol, fail] = enumerate_conflicts(s, t);
    EXPECT_EQ(std::set<Position>(r.solvable.begin(), r.solvable.end()), sol);
    EXPECT_EQ(std::set<Position>(r.failure.begin(), r.failure.end()), fail);
  }
}

TEST(Renaming, Equivalence) {
  EXPECT_TRUE(renaming_equivalent(T("f(?x, g(?y, ?y))"), T("f(?z, g(?w, ?w))")));
  EXPECT_FALSE(renaming_equivalent(T("f(?x, ?x)"), T("f(?x, ?y)")));
  EXPECT_FALSE(renaming_equivalent(T("f(?x, ?y)"), T("f(?x, ?x)")));
  EXPECT_TRUE(renaming_equivalent(T("f(#a, g(?x3, ?x3))"), T("f(#a, g(?x, ?x))")));
}

TEST(Renaming, CanonicalRenamingIsRenaming) {
  const Term t = T("f(?x7, g(?x2, ?x7))");
  const Term c = canonical_renaming(t).apply(t);
  EXPECT_TRUE(renaming_equivalent(t, c));
  EXPECT_EQ(variables_in_order(c), (std::vector<VarId>{0, 1}));
}

TEST(Term, CompareIsTotalOrder) {
  std::mt19937 rng(3);
  PairGenerator gen({.seed = 5});
  std::vector<Term> ts;
  for (int i = 0; i < 40; ++i) {
    auto [a, b] = gen.next();
    ts.push_back(a);
    ts.push_back(b);
  }
  for (const Term& a : ts) {
    for (const Term& b : ts) {
      EXPECT_EQ(compare_terms(a, b) == 0, a == b);
      EXPECT_EQ(compare_terms(a, b) < 0, compare_terms(b, a) > 0);
    }
  }
}
