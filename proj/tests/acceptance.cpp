// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scpau/scpau.hpp"

using namespace scpau;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kWarningMs = 1000;
constexpr double kExampleMs = 100;
constexpr std::size_t kOraclePairs = 1000;
constexpr double kOracleSuiteMs = 5 * 60 * 1000;
constexpr std::size_t kRandomInteractions = 100;
constexpr std::size_t kRandomMaxSize = 40;
constexpr std::size_t kPartitions = 5;
constexpr std::chrono::milliseconds kCompositionTimeout{60'000};
constexpr std::size_t kAdversarialBudget = 100'000;
constexpr double kAdversarialFailMs = 1000;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Collects measure and invariant problems from every run it observes.
struct Audit {
  std::size_t configs = 0, edges = 0, pair_steps = 0, expand_steps = 0;
  std::size_t measure_violations = 0, invariant_violations = 0;
  bool check_invariants = true;
  std::string first_problem;
  Observer obs;

  Audit() {
    obs.on_config = [this](const Configuration& c) {
      ++configs;
      if (!check_invariants) return;
      if (auto v = invariant_violation(c)) {
        ++invariant_violations;
        if (first_problem.empty()) first_problem = *v;
      }
    };
    obs.on_edge = [this](Rule r, const Configuration& from, const Configuration& to, VarId) {
      ++edges;
      if (r == Rule::expand_unit) ++expand_steps;
      if (!multiset_greater(measure(from), measure(to))) {
        ++measure_violations;
        if (first_problem.empty()) first_problem = std::string("no decrease on ") + to_string(r);
      }
    };
    obs.on_pair_step = [this](Rule r, std::size_t parent, const std::vector<std::size_t>& kids) {
      ++pair_steps;
      if (r == Rule::expand_unit) ++expand_steps;
      for (std::size_t k : kids) {
        if (k >= parent) {
          ++measure_violations;
          if (first_problem.empty()) first_problem = std::string("pair step grows on ") + to_string(r);
        }
      }
    };
  }
};

struct Report {
  int failures = 0;
  void line(int n, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << " (" << detail << ")" << std::endl;
    if (!ok) ++failures;
  }
};

std::string fmt_ms(double ms) {
  std::ostringstream s;
  s.precision(3);
  s << std::fixed << ms << " ms";
  return s.str();
}

Term T(const char* text) { return parse_term(text); }
Term I(const char* text) { return parse_interaction(text); }
Position P(std::initializer_list<std::uint32_t> p) { return Position{std::vector<std::uint32_t>(p)}; }

const char* kWarningK =
    "seq(seq(vp(dc, dia, ss), vp(ss, not, tc)), alt(seq(vp(tc, con, dc), vp(dc, ack, tc)), tc!wrn))";
const char* kWarningI = "seq(tc?not, alt(tc!wrn, seq(tc!con, tc?ack)))";
const char* kWarningJ = "seq(seq(vp(dc, dia, ss), ss!not), alt(seq(dc?con, dc!ack), 0))";

// Criterion 1: the warning example end to end.
bool warning(Audit& audit, std::string& detail) {
  const Theory e = interactions_theory();
  const Term i = I(kWarningI), j = I(kWarningJ);
  const Tagging gamma{{{P({1}), P({1, 2}), Symbol::special("a")},
                       {P({2, 2, 1}), P({2, 1, 1}), Symbol::special("b")},
                       {P({2, 2, 2}), P({2, 1, 2}), Symbol::special("c")}}};
  const auto t0 = Clock::now();
  const Abstraction a = abstract_with_gates(i, Side::left, gamma);
  const Abstraction b = abstract_with_gates(j, Side::right, gamma);
  const GenResult r = generalize(a.term, b.term, e, {.fail_rule = true, .mode = Mode::maximal, .observer = &audit.obs});
  const Composition c = compose(i, j, gamma, e);
  const double ms = ms_since(t0);

  bool ok = r.status == GenStatus::solutions && !r.solutions.empty();
  const Term expected = I("seq(seq(?x, #a), alt(seq(#b, #c), ?y))");
  const Term empty = empty_interaction(), u = I("tc!wrn"), v = I("vp(dc, dia, ss)");
  for (const Generalization& g : r.solutions) {
    ok = ok && renaming_equivalent_modulo(g.term, expected, e);
    const auto vars = variables(g.term);
    ok = ok && vars.size() == 2;
    bool saw_x = false, saw_y = false;
    for (VarId z : vars) {
      const Term l = *g.left.find(z), rr = *g.right.find(z);
      saw_x = saw_x || (eq_modulo(l, empty, e) && eq_modulo(rr, v, e));
      saw_y = saw_y || (eq_modulo(l, u, e) && eq_modulo(rr, empty, e));
    }
    ok = ok && saw_x && saw_y;
  }
  const bool k_ok = normalize(c.k, e) == normalize(I(kWarningK), e);
  detail = std::to_string(r.solutions.size()) + " maximal solution(s), k " + (k_ok ? "recovered" : "differs") +
           ", " + fmt_ms(ms);
  return ok && k_ok && ms < kWarningMs;
}

// Criterion 2: small worked examples.
bool examples(Audit& audit, std::string& detail) {
  bool ok = true;
  double worst = 0;
  auto timed = [&](const Term& s, const Term& t, const Theory& e) {
    const auto t0 = Clock::now();
    GenResult r = generalize(s, t, e, {.fail_rule = true, .mode = Mode::first, .observer = &audit.obs});
    worst = std::max(worst, ms_since(t0));
    return r;
  };
  {
    const auto r = timed(T("f(#a, g(u, u))"), T("f(#a, g(v, v))"), Theory{});
    bool good = r.status == GenStatus::solutions && r.solutions.size() == 1;
    if (good) {
      const Generalization& g = r.solutions[0];
      good = renaming_equivalent(g.term, T("f(#a, g(?x, ?x))"));
      const auto vars = variables(g.term);
      good = good && vars.size() == 1 && g.left.size() == 1 && g.right.size() == 1 &&
             *g.left.find(vars[0]) == T("u") && *g.right.find(vars[0]) == T("v");
    }
    ok = ok && good;
  }
  {
    const auto r = timed(T("f(#a, g(#b, u))"), T("f(#a, g(v, #b))"), Theory{});
    bool good = r.status == GenStatus::failure && r.blocking.size() == 2;
    auto has = [&](const Term& a, const Term& b) {
      return std::find(r.blocking.begin(), r.blocking.end(), std::make_pair(a, b)) != r.blocking.end();
    };
    good = good && has(T("#b"), T("v")) && has(T("u"), T("#b"));
    ok = ok && good;
  }
  {
    Theory e;
    e.set(Symbol::function("g", 2), {.assoc = false, .comm = true, .unit = std::nullopt});
    const auto r = timed(T("f(#a, g(#b, u))"), T("f(#a, g(v, #b))"), e);
    ok = ok && r.status == GenStatus::solutions && r.solutions.size() == 1 &&
         renaming_equivalent(r.solutions[0].term, T("f(#a, g(#b, ?x))"));
  }
  detail = "3 examples, slowest " + fmt_ms(worst);
  return ok && worst < kExampleMs;
}

// Criterion 3: agreement with the brute-force oracle under the empty theory.
bool oracle(Audit& audit, std::string& detail) {
  PairGenerator gen({.max_size = 12, .specials = 3, .seed = 2024});
  std::size_t agree = 0, failures = 0, oracle_errors = 0;
  std::string first_bad;
  const auto t0 = Clock::now();
  for (std::size_t n = 0; n < kOraclePairs; ++n) {
    const auto [s, t] = gen.next();
    const GenResult r = generalize(s, t, Theory{}, {.fail_rule = true, .mode = Mode::first, .observer = &audit.obs});
    std::vector<Term> cpg;
    try {
      cpg = oracle_cpg(s, t, std::max(s.size(), t.size()));
    } catch (const Error&) {
      ++oracle_errors;
      if (first_bad.empty()) first_bad = "oracle gave up on " + render(s) + " / " + render(t);
      continue;
    }
    const bool engine_fail = r.status == GenStatus::failure;
    const bool oracle_empty = cpg.empty();
    const bool cpos_fail = !conflict_positions(s, t).failure.empty();
    bool good = r.status != GenStatus::timeout && engine_fail == oracle_empty && oracle_empty == cpos_fail;
    if (good && !engine_fail) {
      const auto top = maximal_elements(cpg);
      good = top.size() == 1 && r.solutions.size() == 1 && renaming_equivalent(r.solutions[0].term, top[0]);
    }
    failures += engine_fail;
    if (good) {
      ++agree;
    } else if (first_bad.empty()) {
      first_bad = render(s) + " / " + render(t);
    }
  }
  const double ms = ms_since(t0);
  detail = std::to_string(agree) + "/" + std::to_string(kOraclePairs) + " agree, " + std::to_string(failures) +
           " failures, " + fmt_ms(ms);
  if (oracle_errors) detail += ", oracle gave up " + std::to_string(oracle_errors) + " times";
  if (!first_bad.empty()) detail += ", first disagreement: " + first_bad;
  return agree == kOraclePairs && ms < kOracleSuiteMs;
}

struct RoundTrip {
  std::size_t cases = 0, interactions = 0;
  std::size_t ok_norm = 0, ok_mut = 0;
  std::size_t compared = 0, fail_le_nofail = 0;
  std::string first_bad;
};

void round_trip_case(const std::string& name, const Term& k, const Theory& e, Audit& audit, RoundTrip& out,
                     std::uint64_t seed) {
  BenchOptions opts;
  opts.partitions = kPartitions;
  opts.timeout = kCompositionTimeout;
  opts.nofail_timeout = std::chrono::milliseconds(10'000);
  opts.nofail_budget = 1'000'000;
  opts.seed = seed;
  opts.observer = &audit.obs;
  const auto records = bench_interaction(name, k, e, opts);
  if (!records.empty()) ++out.interactions;
  auto good = [](const RunOutcome& r) {
    return r.completed && r.composed && r.matches && r.sound && r.millis < kCompositionTimeout.count();
  };
  for (const BenchRecord& rec : records) {
    ++out.cases;
    out.ok_norm += good(rec.norm.with_fail);
    out.ok_mut += good(rec.mut.with_fail);
    if ((!good(rec.norm.with_fail) || !good(rec.mut.with_fail)) && out.first_bad.empty()) {
      std::string p1;
      for (const Lifeline& l : rec.partition.part1) p1 += (p1.empty() ? "" : ",") + l;
      out.first_bad = rec.name + " part1={" + p1 + "}: " + render_interaction(k);
    }
    for (const VariantOutcome* v : {&rec.norm, &rec.mut}) {
      if (v->with_fail.completed && v->without_fail.completed) {
        ++out.compared;
        out.fail_le_nofail += v->with_fail.explored <= v->without_fail.explored;
      }
    }
  }
}

// Criterion 6 data; also feeds criterion 7.
RoundTrip round_trips(Audit& audit) {
  const Theory e = interactions_theory();
  RoundTrip rt;
  const std::vector<Lifeline> names{"a", "b", "c", "d", "e", "f"};
  std::size_t made = 0;
  for (std::uint64_t seed = 0; made < kRandomInteractions; ++seed) {
    std::vector<Lifeline> ls(names.begin(), names.begin() + 2 + static_cast<std::ptrdiff_t>(seed % 5));
    const Term k = random_interaction({.max_size = kRandomMaxSize, .lifelines = ls, .seed = seed});
    if (lifelines_of(k).size() < 2) continue;
    ++made;
    round_trip_case("random" + std::to_string(seed), k, e, audit, rt, seed);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(SCPAU_CORPUS)) {
    if (entry.is_regular_file() && entry.path().extension() == ".int") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    const Term k = parse_interaction(read_file(f.string()));
    round_trip_case(f.stem().string(), k, e, audit, rt, 0);
  }
  return rt;
}

// Criterion 7, adversarial half.
bool adversarial(std::string& detail) {
  const Theory e = interactions_theory();
  const fs::path dir = fs::path(SCPAU_CORPUS) / "adversarial";
  const Term s = parse_interaction(read_file((dir / "gate_shift.left.int").string()));
  const Term t = parse_interaction(read_file((dir / "gate_shift.right.int").string()));
  const auto t0 = Clock::now();
  const GenResult with = generalize(s, t, e, {.fail_rule = true});
  const double with_ms = ms_since(t0);
  const GenResult without = generalize(
      s, t, e,
      {.fail_rule = false, .timeout = std::chrono::milliseconds(600'000), .node_budget = kAdversarialBudget});
  detail = "adversarial: with Fail " + std::string(to_string(with.status)) + " in " + fmt_ms(with_ms) + " (" +
           std::to_string(with.stats.explored) + " nodes), without Fail " + to_string(without.status) + " after " +
           std::to_string(without.stats.explored) + " nodes";
  return with.status != GenStatus::timeout && with_ms < kAdversarialFailMs &&
         without.status == GenStatus::timeout && without.stats.explored > kAdversarialBudget;
}

// Criterion 8.
bool theory_guard(std::string& detail) {
  const bool builtin_ok = validate_sc_preserving(interactions_theory());
  Theory bad;
  bad.add_equation(T("f(#af, ?x)"), T("#af"));
  const bool bad_rejected = !validate_sc_preserving(bad);
  bool refused = false;
  try {
    generalize(T("f(#af, u)"), T("f(#af, v)"), bad);
  } catch (const Error& err) {
    refused = err.kind() == ErrorKind::unsafe_theory;
  }
  detail = std::string("builtin ") + (builtin_ok ? "accepted" : "rejected") + ", absorbing theory " +
           (bad_rejected ? "rejected" : "accepted") + ", generalize " + (refused ? "refused" : "ran");
  return builtin_ok && bad_rejected && refused;
}

}  // namespace

int main() {
  Report rep;
  Audit structural;  // criteria 1-3
  Audit bench;       // criterion 6
  // Invariants are only required on criteria 1-3; the bench run keeps the cheaper checks.
  bench.check_invariants = false;

  std::string d1, d2, d3;
  bool c1 = false, c2 = false, c3 = false;
  auto guarded = [](const std::function<bool(std::string&)>& f, std::string& d) {
    try {
      return f(d);
    } catch (const std::exception& ex) {
      d = std::string("exception: ") + ex.what();
      return false;
    }
  };
  c1 = guarded([&](std::string& d) { return warning(structural, d); }, d1);
  c2 = guarded([&](std::string& d) { return examples(structural, d); }, d2);
  c3 = guarded([&](std::string& d) { return oracle(structural, d); }, d3);
  rep.line(1, c1, "composition example end to end", d1);
  rep.line(2, c2, "worked examples", d2);
  rep.line(3, c3, "oracle equivalence over random pairs, empty theory", d3);

  RoundTrip rt;
  std::string bench_error;
  try {
    rt = round_trips(bench);
  } catch (const std::exception& ex) {
    bench_error = ex.what();
  }

  {
    const std::size_t violations = structural.measure_violations + bench.measure_violations;
    std::string d = std::to_string(structural.edges + bench.edges) + " edges, " +
                    std::to_string(structural.pair_steps + bench.pair_steps) + " pair steps, " +
                    std::to_string(structural.expand_steps + bench.expand_steps) + " expand-unit steps, " +
                    std::to_string(violations) + " violations";
    if (violations) d += ", first: " + (structural.first_problem.empty() ? bench.first_problem : structural.first_problem);
    rep.line(4, violations == 0 && bench_error.empty(), "termination measure decreases", d);
  }
  {
    std::string d = std::to_string(structural.configs) + " configurations, " +
                    std::to_string(structural.invariant_violations) + " violations";
    if (structural.invariant_violations) d += ", first: " + structural.first_problem;
    rep.line(5, structural.invariant_violations == 0, "configuration invariants", d);
  }
  {
    std::ostringstream d;
    d << rt.interactions << " interactions, " << rt.cases << " cases; with Fail: norm " << rt.ok_norm << "/"
      << rt.cases << ", mut " << rt.ok_mut << "/" << rt.cases;
    if (!bench_error.empty()) d << ", error: " << bench_error;
    if (!rt.first_bad.empty()) d << ", first miss: " << rt.first_bad;
    const bool ok = bench_error.empty() && rt.cases > 0 && rt.ok_norm == rt.cases && rt.ok_mut == rt.cases;
    rep.line(6, ok, "composition round trip", d.str());
  }
  {
    std::string adv;
    const bool adv_ok = guarded(adversarial, adv);
    std::string d = std::to_string(rt.fail_le_nofail) + "/" + std::to_string(rt.compared) +
                    " completed pairs explore no more with Fail; " + adv;
    rep.line(7, adv_ok && rt.compared > 0 && rt.fail_le_nofail == rt.compared && bench_error.empty(),
             "Fail rule pruning", d);
  }
  {
    std::string d;
    const bool ok = guarded(theory_guard, d);
    rep.line(8, ok, "theory guard", d);
  }
  return rep.failures == 0 ? 0 : 1;
}
