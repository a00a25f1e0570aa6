#include <gtest/gtest.h>

#include "scpau/scpau.hpp"

using namespace scpau;

namespace {

Term I(const char* text) { return parse_interaction(text); }
Position P(std::initializer_list<std::uint32_t> p) { return Position{std::vector<std::uint32_t>(p)}; }
Symbol G(const char* n) { return Symbol::special(n); }

const char* kWarningK =
    "seq(seq(vp(dc, dia, ss), vp(ss, not, tc)), alt(seq(vp(tc, con, dc), vp(dc, ack, tc)), tc!wrn))";
const char* kWarningI = "seq(tc?not, alt(tc!wrn, seq(tc!con, tc?ack)))";
const char* kWarningJ = "seq(seq(vp(dc, dia, ss), ss!not), alt(seq(dc?con, dc!ack), 0))";

Tagging warning_gamma() {
  return {{{P({1}), P({1, 2}), G("a")}, {P({2, 2, 1}), P({2, 1, 1}), G("b")}, {P({2, 2, 2}), P({2, 1, 2}), G("c")}}};
}

// Projection computed leaf by leaf from the definition.
Term project_by_hand(const Term& k, const LifelineSet& ls) {
  std::vector<Term> kids;
  for (const Term& c : k.children()) kids.push_back(project_by_hand(c, ls));
  if (k.arity() > 0) return Term::app(k.symbol(), kids);
  const std::string& n = k.symbol().name();
  if (n == "0") return k;
  if (n.starts_with("vp(")) {
    const auto c1 = n.find(", "), c2 = n.rfind(", ");
    const std::string l1 = n.substr(3, c1 - 3), m = n.substr(c1 + 2, c2 - c1 - 2);
    const std::string l2 = n.substr(c2 + 2, n.size() - c2 - 3);
    const bool in1 = ls.contains(l1), in2 = ls.contains(l2);
    if (in1 && in2) return k;
    if (in1) return emission(l1, m);
    if (in2) return reception(l2, m);
    return empty_interaction();
  }
  const auto bang = n.find_first_of("!?");
  return ls.contains(n.substr(0, bang)) ? k : empty_interaction();
}

}  // namespace

TEST(Atoms, Construction) {
  EXPECT_EQ(vp("dc", "dia", "ss").symbol().name(), "vp(dc, dia, ss)");
  EXPECT_EQ(emission("tc", "wrn").symbol().name(), "tc!wrn");
  EXPECT_EQ(reception("tc", "not").symbol().name(), "tc?not");
  EXPECT_THROW(vp("a", "m", "a"), Error);
  const auto a = decode_atom(vp("dc", "dia", "ss"));
  ASSERT_TRUE(a);
  const auto& v = std::get<ValuePassing>(*a);
  EXPECT_EQ(v.sender, "dc");
  EXPECT_EQ(v.receiver, "ss");
  EXPECT_FALSE(decode_atom(empty_interaction()));
}

TEST(Lifelines, Examples) {
  EXPECT_EQ(lifelines_of(vp("dc", "dia", "ss")), (LifelineSet{"dc", "ss"}));
  EXPECT_TRUE(lifelines_of(empty_interaction()).empty());
  EXPECT_EQ(lifelines_of(I(kWarningK)), (LifelineSet{"dc", "ss", "tc"}));
}

TEST(Project, Examples) {
  EXPECT_EQ(project(vp("tc", "con", "dc"), {"tc"}), emission("tc", "con"));
  EXPECT_EQ(project(vp("tc", "con", "dc"), {"dc"}), reception("dc", "con"));
  EXPECT_EQ(project(vp("dc", "dia", "ss"), {"dc", "ss"}), vp("dc", "dia", "ss"));
  const Theory e = interactions_theory();
  const Term k = I(kWarningK);
  EXPECT_TRUE(lifelines_of(project(k, {})).empty());
  EXPECT_TRUE(eq_modulo(project(k, {"tc"}), I(kWarningI), e));
  EXPECT_TRUE(eq_modulo(project(k, {"dc", "ss"}), I(kWarningJ), e));
}

TEST(Project, HomomorphicAndShapePreserving) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Term k = random_interaction({.max_size = 40, .lifelines = {"a", "b", "c", "d", "e", "f"}, .seed = s});
    const LifelineSet ls{"a", "c", "e"};
    const Term p = project(k, ls);
    EXPECT_EQ(p, project_by_hand(k, ls));
    EXPECT_EQ(positions(p), positions(k));
    for (const Position& q : positions(k)) {
      const Term& sub = subterm_at(k, q);
      if (sub.arity() > 0) {
        EXPECT_EQ(subterm_at(p, q).symbol(), sub.symbol());
      }
    }
  }
}

TEST(Tagging, Validation) {
  const Term i = I(kWarningI), j = I(kWarningJ);
  EXPECT_TRUE(validate_tagging(i, j, warning_gamma()));
  EXPECT_TRUE(validate_tagging(i, j, {}));
  // tc!wrn with ss!not: two emissions.
  EXPECT_FALSE(validate_tagging(i, j, {{{P({2, 1}), P({1, 2}), G("a")}}}));
  // One gate for two different pairs.
  EXPECT_FALSE(validate_tagging(i, j, {{{P({1}), P({1, 2}), G("a")}, {P({2, 2, 1}), P({2, 1, 1}), G("a")}}}));
  EXPECT_FALSE(validate_tagging(i, j, {{{P({9}), P({1, 2}), G("a")}}}));
  EXPECT_THROW(validate_tagging(i, i, {}), Error);
}

TEST(Tagging, AbstractWarning) {
  const Abstraction a = abstract_with_gates(I(kWarningI), Side::left, warning_gamma());
  EXPECT_EQ(a.term, I("seq(#a, alt(tc!wrn, seq(#b, #c)))"));
  EXPECT_EQ(a.lambda.at(G("a")), reception("tc", "not"));
  EXPECT_EQ(a.lambda.at(G("b")), emission("tc", "con"));
  EXPECT_EQ(a.lambda.at(G("c")), reception("tc", "ack"));
  const Abstraction b = abstract_with_gates(I(kWarningJ), Side::right, warning_gamma());
  EXPECT_EQ(b.term, I("seq(seq(vp(dc, dia, ss), #a), alt(seq(#b, #c), 0))"));
  EXPECT_EQ(b.lambda.at(G("a")), emission("ss", "not"));
  EXPECT_EQ(abstract_with_gates(I(kWarningI), Side::left, {}).term, I(kWarningI));
}

TEST(Tagging, DeriveWarning) {
  const DerivedViews v = derive_tagging(I(kWarningK), {"tc"}, {"dc", "ss"});
  EXPECT_EQ(v.gamma.gate_count(), 3u);
  EXPECT_TRUE(validate_tagging(v.i, v.j, v.gamma));
  std::set<std::string> pairs;
  for (const TagEntry& e : v.gamma.entries) {
    pairs.insert(render(subterm_at(v.i, e.left)) + " " + render(subterm_at(v.j, e.right)));
  }
  EXPECT_EQ(pairs, (std::set<std::string>{"tc?not ss!not", "tc!con dc?con", "tc?ack dc!ack"}));
}

TEST(Tagging, DeriveSmallCases) {
  const DerivedViews one = derive_tagging(vp("a", "m", "b"), {"a"}, {"b"});
  EXPECT_EQ(one.i, emission("a", "m"));
  EXPECT_EQ(one.j, reception("b", "m"));
  ASSERT_EQ(one.gamma.entries.size(), 1u);
  EXPECT_TRUE(one.gamma.entries[0].left.is_root());
  const DerivedViews none = derive_tagging(I("seq(vp(a, m, b), c!n)"), {"a", "b"}, {"c"});
  EXPECT_TRUE(none.gamma.empty());
  EXPECT_THROW(derive_tagging(vp("a", "m", "b"), {"a"}, {"a", "b"}), Error);
  EXPECT_THROW(derive_tagging(vp("a", "m", "b"), {"a"}, {}), Error);
}

TEST(Tagging, DeriveRoundTrip) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Term k = random_interaction({.max_size = 30, .lifelines = {"a", "b", "c", "d"}, .seed = s});
    const DerivedViews v = derive_tagging(k, {"a", "c"}, {"b", "d"});
    ASSERT_TRUE(validate_tagging(v.i, v.j, v.gamma));
    const Abstraction a = abstract_with_gates(v.i, Side::left, v.gamma);
    const Abstraction b = abstract_with_gates(v.j, Side::right, v.gamma);
    EXPECT_EQ(apply_gate_mapping(a.term, a.lambda), v.i);
    EXPECT_EQ(apply_gate_mapping(b.term, b.lambda), v.j);
    std::set<Symbol> gates;
    for (const TagEntry& e : v.gamma.entries) gates.insert(e.gate);
    EXPECT_EQ(std::set<Symbol>(a.term.special_constants().begin(), a.term.special_constants().end()), gates);
    EXPECT_EQ(std::set<Symbol>(b.term.special_constants().begin(), b.term.special_constants().end()), gates);
  }
}

TEST(Compose, Warning) {
  const Theory e = interactions_theory();
  const Composition c = compose(I(kWarningI), I(kWarningJ), warning_gamma(), e);
  EXPECT_EQ(normalize(c.k, e), normalize(I(kWarningK), e));
  EXPECT_TRUE(check_composition_sound(I(kWarningI), I(kWarningJ), c.k, e));
  EXPECT_EQ(c.lambda_k.at(G("a")), vp("ss", "not", "tc"));
  EXPECT_EQ(c.lambda_k.at(G("b")), vp("tc", "con", "dc"));
  EXPECT_EQ(c.lambda_k.at(G("c")), vp("dc", "ack", "tc"));
}

TEST(Compose, NoGates) {
  const Theory e = interactions_theory();
  const Term u = emission("a", "m"), v = reception("b", "n");
  const Composition c = compose(u, v, {}, e);
  EXPECT_EQ(normalize(c.k, e), normalize(Term::app(isym::seq(), {u, v}), e));
  EXPECT_TRUE(check_composition_sound(u, v, c.k, e));
}

TEST(Compose, Conflict) {
  const Theory e = interactions_theory();
  // The gates occur in opposite orders under a non-commutative seq.
  const Term i = I("seq(a!m, a?n)");
  const Term j = I("seq(b!n, b?m)");
  const Tagging g{{{P({1}), P({2}), G("p")}, {P({2}), P({1}), G("q")}}};
  ASSERT_TRUE(validate_tagging(i, j, g));
  try {
    compose(i, j, g, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::no_composition);
  }
  EXPECT_THROW(compose(i, j, {{{P({1}), P({1}), G("p")}}}, e), Error);
}

TEST(Compose, SoundnessCheck) {
  const Theory e = interactions_theory();
  const Term i = I(kWarningI), j = I(kWarningJ);
  EXPECT_TRUE(check_composition_sound(i, j, I(kWarningK), e));
  const Term dropped = I("seq(seq(vp(dc, dia, ss), vp(ss, not, tc)), seq(vp(tc, con, dc), vp(dc, ack, tc)))");
  EXPECT_FALSE(check_composition_sound(i, j, dropped, e));
}

TEST(Compose, RandomRoundTripIsSound) {
  const Theory e = interactions_theory();
  int matched = 0;
  for (std::uint64_t s = 0; s < 80; ++s) {
    const Term k = random_interaction({.max_size = 25, .lifelines = {"a", "b", "c", "d"}, .seed = s});
    const DerivedViews v = derive_tagging(k, {"a", "b"}, {"c", "d"});
    const Composition c = compose(v.i, v.j, v.gamma, e);
    EXPECT_TRUE(check_composition_sound(v.i, v.j, c.k, e)) << render(k);
    matched += normalize(c.k, e) == normalize(k, e);
  }
  EXPECT_GT(matched, 40);
}
