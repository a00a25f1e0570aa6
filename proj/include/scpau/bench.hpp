#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scpau/interaction.hpp"
#include "scpau/mutate.hpp"
#include "scpau/normalize.hpp"
#include "scpau/textio.hpp"

namespace scpau {

struct Partition {
  LifelineSet part1;
  LifelineSet part2;
};

/// Up to `count` distinct near-balanced partitions: |part1| = ⌊n/2⌋, |part2| = ⌈n/2⌉.
inline std::vector<Partition> sample_partitions(const LifelineSet& lifelines, std::size_t count,
                                                std::uint64_t seed) {
  std::vector<Lifeline> all(lifelines.begin(), lifelines.end());
  const std::size_t half = all.size() / 2;
  std::mt19937_64 rng(seed);
  std::vector<Partition> out;
  std::set<LifelineSet> seen;
  // Bounded retries: small lifeline sets have few distinct splits.
  for (std::size_t attempt = 0; attempt < 64 * (count + 1) && out.size() < count; ++attempt) {
    std::shuffle(all.begin(), all.end(), rng);
    LifelineSet p1(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(half));
    if (!seen.insert(p1).second) continue;
    out.push_back({p1, LifelineSet(all.begin() + static_cast<std::ptrdiff_t>(half), all.end())});
  }
  return out;
}

struct BenchOptions {
  std::size_t partitions = 5;
  std::size_t mutations = 7;
  std::chrono::milliseconds timeout{60'000};
  /// Separate limits for the runs without the Fail rule.
  std::chrono::milliseconds nofail_timeout{60'000};
  std::size_t nofail_budget = 20'000'000;
  std::uint64_t seed = 0;
  const Observer* observer = nullptr;
};

/// One composition attempt.
struct RunOutcome {
  bool completed = false;  // finished without timeout
  bool composed = false;   // a composition was produced
  bool matches = false;    // normal form equals that of k
  bool sound = false;      // projections give back the views
  double millis = 0;
  std::size_t explored = 0;
  std::string error;
  std::optional<Term> k;
};

struct VariantOutcome {
  RunOutcome with_fail;
  RunOutcome without_fail;
};

struct BenchRecord {
  std::string name;
  Term k;
  Partition partition;
  std::size_t size_k = 0;
  std::size_t gates = 0;
  VariantOutcome norm;
  VariantOutcome mut;

  bool success() const {
    return norm.with_fail.matches && mut.with_fail.matches && norm.with_fail.sound && mut.with_fail.sound;
  }
};

inline RunOutcome run_composition(const Term& k, const DerivedViews& views, const Term& s,
                                  const GateMapping& li, const Term& t, const GateMapping& lj,
                                  const Theory& e, GenOptions gen) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  const GenResult res = generalize(s, t, e, gen);
  out.explored = res.stats.explored;
  out.completed = res.status != GenStatus::timeout;
  try {
    const Composition c = build_composition(res, s, li, t, lj, e);
    out.composed = true;
    out.k = c.k;
    out.matches = normalize(c.k, e) == normalize(k, e);
    out.sound = check_composition_sound(views.i, views.j, c.k, e);
  } catch (const Error& err) {
    out.error = err.what();
  }
  out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Derive views, abstract gates, compose both variants and compare with k.
inline BenchRecord run_case(const std::string& name, const Term& k, const Partition& part,
                            const Theory& e, const BenchOptions& opts, std::uint64_t seed) {
  BenchRecord rec;
  rec.name = name;
  rec.k = k;
  rec.partition = part;
  rec.size_k = k.size();
  const DerivedViews views = derive_tagging(k, part.part1, part.part2);
  rec.gates = views.gamma.gate_count();
  const Abstraction a = abstract_with_gates(views.i, Side::left, views.gamma);
  const Abstraction b = abstract_with_gates(views.j, Side::right, views.gamma);

  GenOptions with;
  with.fail_rule = true;
  with.timeout = opts.timeout;
  with.observer = opts.observer;
  GenOptions without = with;
  without.fail_rule = false;
  without.timeout = opts.nofail_timeout;
  without.node_budget = opts.nofail_budget;

  auto run_variant = [&](const Term& s, const Term& t) {
    VariantOutcome v;
    v.with_fail = run_composition(k, views, s, a.lambda, t, b.lambda, e, with);
    v.without_fail = run_composition(k, views, s, a.lambda, t, b.lambda, e, without);
    return v;
  };
  rec.norm = run_variant(normalize(a.term, e), normalize(b.term, e));
  rec.mut = run_variant(mutate_commutative(a.term, e, opts.mutations, seed),
                        mutate_commutative(b.term, e, opts.mutations, seed + 1));
  return rec;
}

struct BenchReport {
  std::vector<BenchRecord> records;
  std::vector<std::string> errors;  // per-file problems; the run continues past them
};

inline std::vector<BenchRecord> bench_interaction(const std::string& name, const Term& k,
                                                  const Theory& e, const BenchOptions& opts) {
  std::vector<BenchRecord> out;
  const std::uint64_t base = opts.seed ^ std::hash<std::string>{}(name);
  const auto parts = sample_partitions(lifelines_of(k), opts.partitions, base);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    out.push_back(run_case(name + "#" + std::to_string(p), k, parts[p], e, opts, base + 97 * p));
  }
  return out;
}

/// Runs every .int file of `dir` in name order.
inline BenchReport run_bench(const std::string& dir, const BenchOptions& opts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::io_error, "not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".int") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const Theory e = interactions_theory();
  BenchReport report;
  for (const fs::path& f : files) {
    try {
      const Term k = parse_interaction(read_file(f.string()), false);
      for (BenchRecord& r : bench_interaction(f.stem().string(), k, e, opts)) report.records.push_back(std::move(r));
    } catch (const Error& err) {
      report.errors.push_back(f.filename().string() + ": " + err.what());
    }
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const BenchRecord& a, const BenchRecord& b) { return a.name < b.name; });
  return report;
}

inline std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "name,size_k,n_gates,dur_norm_fail_ms,dur_norm_nofail_ms,dur_mut_fail_ms,dur_mut_nofail_ms,"
         "success,explored_fail,explored_nofail\n";
  auto dur = [](const RunOutcome& r) {
    if (!r.completed) return std::string("timeout");
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << r.millis;
    return s.str();
  };
  for (const BenchRecord& r : records) {
    const bool nofail_done = r.norm.without_fail.completed && r.mut.without_fail.completed;
    out << r.name << ',' << r.size_k << ',' << r.gates << ',' << dur(r.norm.with_fail) << ','
        << dur(r.norm.without_fail) << ',' << dur(r.mut.with_fail) << ',' << dur(r.mut.without_fail) << ','
        << (r.success() ? "true" : "false") << ','
        << (r.norm.with_fail.explored + r.mut.with_fail.explored) << ','
        << (nofail_done ? std::to_string(r.norm.without_fail.explored + r.mut.without_fail.explored)
                        : std::string("timeout"))
        << '\n';
  }
  return out.str();
}

}  // namespace scpau
