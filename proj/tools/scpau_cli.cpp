#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "scpau/scpau.hpp"

using namespace scpau;

namespace {

enum Exit { ok = 0, negative = 1, timed_out = 2, input_error = 3 };

bool is_interaction_file(const std::string& path) {
  return std::filesystem::path(path).extension() == ".int";
}

Term load_term(const std::string& path) {
  const std::string text = read_file(path);
  return is_interaction_file(path) ? parse_interaction(detail::trim(text)) : parse_term(detail::trim(text));
}

std::string show(const Term& t, bool interaction) { return interaction ? render_interaction(t) : render(t); }

LifelineSet split_list(const std::string& s) {
  LifelineSet out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto v = detail::trim(item);
    if (!v.empty()) out.insert(std::string(v));
  }
  return out;
}

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("SCPAU_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::syntax_error, "SCPAU_SEED is not a number");
    }
  }
  return seed;
}

struct TheoryArgs {
  std::string file;
  std::string builtin;

  void add(CLI::App* app) {
    auto* f = app->add_option("--theory", file, "Theory file");
    app->add_option("--builtin", builtin, "Builtin theory: interactions or empty")->excludes(f);
  }

  // Interaction inputs default to the interaction theory.
  Theory get(bool interaction) const {
    if (!file.empty()) return parse_theory(read_file(file));
    if (!builtin.empty()) return builtin_theory(builtin);
    return interaction ? interactions_theory() : Theory{};
  }
};

Mode parse_mode(const std::string& m) {
  if (m == "first") return Mode::first;
  if (m == "all") return Mode::all;
  if (m == "maximal") return Mode::maximal;
  throw Error(ErrorKind::syntax_error, "unknown mode '" + m + "'");
}

std::string show_subst(const Substitution& s, const Term& r, bool interaction) {
  // Print with the variable names render() gives r.
  std::map<VarId, std::size_t> names;
  for (VarId v : variables_in_order(r)) names.emplace(v, names.size());
  std::string out = "{";
  bool first = true;
  for (VarId v : variables_in_order(r)) {
    const Term* t = s.find(v);
    if (!t) continue;
    out += (first ? "" : ", ") + std::string("?x") + std::to_string(names[v]) + " -> " + show(*t, interaction);
    first = false;
  }
  return out + "}";
}

int run_generalize(const std::string& left, const std::string& right, const TheoryArgs& th,
                   const std::string& mode, bool no_fail, double timeout, std::size_t budget) {
  const bool inter = is_interaction_file(left) || is_interaction_file(right);
  const Term s = load_term(left);
  const Term t = load_term(right);
  GenOptions opts;
  opts.fail_rule = !no_fail;
  opts.mode = parse_mode(mode);
  opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000));
  if (budget > 0) opts.node_budget = budget;
  const GenResult r = generalize(s, t, th.get(inter), opts);
  std::cout << "status: " << to_string(r.status) << "\n";
  for (const Generalization& g : r.solutions) {
    std::cout << "r: " << show(g.term, inter) << "\n";
    std::cout << "  sigma_s: " << show_subst(g.left, g.term, inter) << "\n";
    std::cout << "  sigma_t: " << show_subst(g.right, g.term, inter) << "\n";
  }
  for (const auto& [a, b] : r.blocking) std::cout << "blocking: " << show(a, inter) << " ; " << show(b, inter) << "\n";
  std::cout << "explored: " << r.stats.explored << "\n";
  if (r.status == GenStatus::timeout) return timed_out;
  return r.status == GenStatus::solutions ? ok : negative;
}

int run_compose(const std::string& left, const std::string& right, const std::string& tagging,
                const std::string& out, const std::string& mode, double timeout) {
  const Term i = parse_interaction(detail::trim(read_file(left)), false);
  const Term j = parse_interaction(detail::trim(read_file(right)), false);
  const Tagging gamma = parse_tagging(read_file(tagging));
  ComposeOptions opts;
  opts.gen.mode = parse_mode(mode);
  opts.gen.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000));
  try {
    const Composition c = compose(i, j, gamma, interactions_theory(), opts);
    const std::string k = render_interaction(c.k) + "\n";
    if (out.empty()) {
      std::cout << k;
    } else {
      write_file(out, k);
    }
    std::cerr << "r: " << render_interaction(c.r) << "\n";
    return ok;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::no_composition) {
      std::cerr << e.what() << "\n";
      return negative;
    }
    if (e.kind() == ErrorKind::timeout) {
      std::cerr << e.what() << "\n";
      return timed_out;
    }
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Special-constant-preserving anti-unification and interaction composition"};
  app.require_subcommand(1);

  std::string left, right, in, tagging, out, mode = "first", lifelines, part1, part2, dir, report;
  bool no_fail = false;
  double timeout = 60;
  std::size_t budget = 0;
  std::size_t count = 1, partitions = 5, mutations = 7, max_size = 8;
  std::uint64_t seed = 0;
  TheoryArgs th;

  auto* gen = app.add_subcommand("generalize", "Special-constant-preserving generalizations of two ground terms");
  gen->add_option("--left", left)->required();
  gen->add_option("--right", right)->required();
  th.add(gen);
  gen->add_option("--mode", mode)->check(CLI::IsMember({"first", "all", "maximal"}));
  gen->add_flag("--no-fail", no_fail, "Disable the Fail rule");
  gen->add_option("--timeout", timeout, "Seconds");
  gen->add_option("--budget", budget, "Node budget (0: none)");

  auto* comp = app.add_subcommand("compose", "Compose two interactions along a tagging");
  comp->add_option("--left", left)->required();
  comp->add_option("--right", right)->required();
  comp->add_option("--tagging", tagging)->required();
  comp->add_option("-o,--out", out);
  comp->add_option("--mode", mode)->check(CLI::IsMember({"first", "all", "maximal"}));
  comp->add_option("--timeout", timeout, "Seconds");

  auto* proj = app.add_subcommand("project", "Project an interaction onto lifelines");
  proj->add_option("--in", in)->required();
  proj->add_option("--lifelines", lifelines)->required();

  auto* norm = app.add_subcommand("normalize", "Normal form modulo a theory");
  norm->add_option("--in", in)->required();
  TheoryArgs norm_th;
  norm_th.add(norm);

  auto* eq = app.add_subcommand("eq", "Equality modulo a theory (exit 0 equal, 1 not)");
  eq->add_option("--left", left)->required();
  eq->add_option("--right", right)->required();
  TheoryArgs eq_th;
  eq_th.add(eq);

  auto* mut = app.add_subcommand("mutate", "Random argument swaps under commutative operators");
  mut->add_option("--in", in)->required();
  mut->add_option("--count", count);
  mut->add_option("--seed", seed);

  auto* der = app.add_subcommand("derive-tagging", "Views and tagging of an interaction for a partition");
  der->add_option("--in", in)->required();
  der->add_option("--part1", part1)->required();
  der->add_option("--part2", part2)->required();
  der->add_option("--out-prefix", out, "Write PREFIX.left.int, PREFIX.right.int and PREFIX.tag");

  auto* bench = app.add_subcommand("bench", "Composition round-trip benchmark over a corpus directory");
  bench->add_option("--dir", dir)->required();
  bench->add_option("--partitions", partitions);
  bench->add_option("--mutations", mutations);
  bench->add_option("--seed", seed);
  bench->add_option("--timeout", timeout, "Seconds");
  bench->add_option("--report", report, "CSV output (stdout if omitted)");

  auto* orc = app.add_subcommand("oracle", "Brute-force generalizations under the empty theory");
  orc->add_option("--left", left)->required();
  orc->add_option("--right", right)->required();
  orc->add_option("--max-size", max_size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }

  try {
    if (*gen) return run_generalize(left, right, th, mode, no_fail, timeout, budget);
    if (*comp) return run_compose(left, right, tagging, out, mode, timeout);
    if (*proj) {
      const Term k = parse_interaction(detail::trim(read_file(in)));
      std::cout << render_interaction(project(k, split_list(lifelines))) << "\n";
      return ok;
    }
    if (*norm) {
      const bool inter = is_interaction_file(in);
      std::cout << show(normalize(load_term(in), norm_th.get(inter)), inter) << "\n";
      return ok;
    }
    if (*eq) {
      const bool inter = is_interaction_file(left) || is_interaction_file(right);
      const bool same = eq_modulo(load_term(left), load_term(right), eq_th.get(inter));
      std::cout << (same ? "equal" : "different") << "\n";
      return same ? ok : negative;
    }
    if (*mut) {
      const bool inter = is_interaction_file(in);
      const Theory e = interactions_theory();
      std::cout << show(mutate_commutative(load_term(in), e, count, effective_seed(seed)), inter) << "\n";
      return ok;
    }
    if (*der) {
      const Term k = parse_interaction(detail::trim(read_file(in)), false);
      const DerivedViews v = derive_tagging(k, split_list(part1), split_list(part2));
      if (out.empty()) {
        std::cout << "i: " << render_interaction(v.i) << "\n";
        std::cout << "j: " << render_interaction(v.j) << "\n";
        std::cout << render_tagging(v.gamma);
      } else {
        write_file(out + ".left.int", render_interaction(v.i) + "\n");
        write_file(out + ".right.int", render_interaction(v.j) + "\n");
        write_file(out + ".tag", render_tagging(v.gamma));
      }
      return ok;
    }
    if (*bench) {
      BenchOptions opts;
      opts.partitions = partitions;
      opts.mutations = mutations;
      opts.seed = effective_seed(seed);
      opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000));
      opts.nofail_timeout = opts.timeout;
      const BenchReport r = run_bench(dir, opts);
      for (const std::string& e : r.errors) std::cerr << "skipped " << e << "\n";
      const std::string csv = bench_csv(r.records);
      if (report.empty()) {
        std::cout << csv;
      } else {
        write_file(report, csv);
      }
      std::size_t good = 0;
      for (const BenchRecord& rec : r.records) good += rec.success();
      std::cerr << good << "/" << r.records.size() << " cases recovered k\n";
      return ok;
    }
    if (*orc) {
      const Term s = load_term(left);
      const Term t = load_term(right);
      const std::vector<Term> cpg = oracle_cpg(s, t, max_size);
      for (const Term& r : cpg) std::cout << "member: " << render(r) << "\n";
      for (const Term& r : maximal_elements(cpg)) std::cout << "maximal: " << render(r) << "\n";
      return cpg.empty() ? negative : ok;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::timeout) return timed_out;
    return input_error;
  }
  return input_error;
}
