// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are stated on each line.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "prefia/io.hpp"
#include "prefia/representation.hpp"
#include "prefia/scheduler.hpp"
#include "prefia/service.hpp"
#include "prefia/transitivity.hpp"
#include "support.hpp"

using namespace prefia;
using namespace prefia::testing;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (failures.size() < 5) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Outcome enumeration_exactness() {
  Outcome out;
  const auto start = Clock::now();
  const auto weak = enumerate_configs(Mode::Weak);
  const auto strict = enumerate_configs(Mode::Strict);
  const auto pe_weak = chance_expected_agreement(Mode::Weak);
  const auto pe_strict = chance_expected_agreement(Mode::Strict);
  const double elapsed = seconds_since(start);

  auto transitive = [](const std::vector<ConfigEntry>& v) {
    return std::count_if(v.begin(), v.end(), [](const ConfigEntry& e) { return e.transitive; });
  };
  out.require(weak.size() == 27, "weak config count");
  out.require(transitive(weak) == 13, "weak transitive count");
  out.require(pe_weak == Rational(13, 27), "weak P(E)");
  out.require(strict.size() == 8, "strict config count");
  out.require(transitive(strict) == 6, "strict transitive count");
  out.require(pe_strict == Rational(3, 4), "strict P(E)");
  out.require(elapsed < 1.0, "runtime");
  out.detail = "weak " + std::to_string(transitive(weak)) + "/" + std::to_string(weak.size()) +
               " P(E)=" + to_fraction_string(pe_weak) + ", strict " +
               std::to_string(transitive(strict)) + "/" + std::to_string(strict.size()) +
               " P(E)=" + to_fraction_string(pe_strict) + "; exact equality, " +
               std::to_string(elapsed) + " s < 1 s";
  return out;
}

// ---------------------------------------------------------------------------

Outcome expansion_reconciliation() {
  Outcome out;
  const auto e = expand_directional_patterns();

  // Independent count: each pattern fixes an orientation per pair; each pair
  // then becomes a strict answer in that orientation or a tie.
  std::multiset<std::array<int, 3>> seqs;
  for (int orient = 0; orient < 8; ++orient)
    for (int tie = 0; tie < 8; ++tie) {
      std::array<int, 3> cfg{};
      for (int k = 0; k < 3; ++k)
        cfg[k] = (tie >> k & 1) ? 2 : (orient >> k & 1);
      seqs.insert(cfg);
    }
  const std::set<std::array<int, 3>> distinct(seqs.begin(), seqs.end());

  out.require(e.patterns == 8, "patterns");
  out.require(e.sequences == 64 && seqs.size() == 64, "sequences");
  out.require(e.distinct == 27 && distinct.size() == 27, "distinct");
  out.require(e.repetitions == 37 && seqs.size() - distinct.size() == 37, "repetitions");
  out.require(e.distinct_configs.size() == e.distinct, "distinct list size");
  out.detail = std::to_string(e.patterns) + " patterns -> " + std::to_string(e.sequences) +
               " sequences, " + std::to_string(e.repetitions) + " repetitions, " +
               std::to_string(e.distinct) + " distinct; exact counts";
  return out;
}

// ---------------------------------------------------------------------------

Outcome kappa_regression() {
  Outcome out;
  const auto ds = parse_judgments(read_file(fixture("three_annotators.csv")), DataFormat::Csv);
  std::ifstream blocks_in(fixture("three_annotators_blocks.txt"));
  const auto blocks = parse_blocks(blocks_in);
  const auto report = analyze(ds, Mode::Weak, {blocks});

  const std::map<std::string, std::pair<Rational, std::string>> expected{
      {"A1", {Rational(1), "1.0000"}},
      {"A2", {Rational(5, 14), "0.3571"}},
      {"A3", {Rational(-2, 7), "-0.2857"}}};
  std::ostringstream seen;
  out.require(report.entries.size() == 3, "entry count");
  for (const auto& e : report.entries) {
    const auto it = expected.find(e.annotator.str());
    if (it == expected.end() || !e.ia) {
      out.require(false, "unexpected entry " + e.annotator.str());
      continue;
    }
    const auto& [kappa, decimal] = it->second;
    out.require(e.ia->kappa == kappa, e.annotator.str() + " kappa");
    out.require(to_decimal_string(e.ia->kappa) == decimal, e.annotator.str() + " decimal");
    out.require(e.ia->p_e == Rational(13, 27), e.annotator.str() + " P(E)");
    seen << e.annotator.str() << "=" << to_fraction_string(e.ia->kappa) << " ("
         << to_decimal_string(e.ia->kappa) << ") ";
  }
  out.detail = seen.str() + "; exact rational equality, decimals to 4 places";
  return out;
}

// ---------------------------------------------------------------------------

// Random total preorder as an ordered partition: shuffle, then cut.
std::vector<std::size_t> random_ranks(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> rank(n);
  std::size_t level = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && rng() % 2) ++level;
    rank[order[k]] = level;
  }
  return rank;
}

Outcome representation_property_suite() {
  Outcome out;
  std::mt19937_64 rng(20250101);
  std::size_t forward = 0, converse = 0;

  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const auto ids = items_named(n, "x");
    const auto rank = random_ranks(n, rng);
    PreferenceRelation r(std::set<ItemId>(ids.begin(), ids.end()));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        r.insert(ids[i], ids[j],
                 rank[i] > rank[j]   ? Relation::Left
                 : rank[i] < rank[j] ? Relation::Right
                                     : Relation::Tie);
    try {
      const auto f = derive_scores(r, std::set<ItemId>(ids.begin(), ids.end()));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          out.require(r.weakly_prefers(ids[i], ids[j]) ==
                          (f.scores.at(ids[i]) >= f.scores.at(ids[j])),
                      "forward equivalence, trial " + std::to_string(trial));
        }
      ++forward;
    } catch (const std::exception& e) {
      out.require(false, std::string("derive_scores threw: ") + e.what());
    }
  }

  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const auto ids = items_named(n, "y");
    std::uniform_int_distribution<std::int64_t> draw(-5, 5);
    std::vector<std::int64_t> s(n);
    for (auto& v : s) v = draw(rng);
    const auto induced = relation_from_scores(ids, s);
    try {
      const auto f = derive_scores(induced, std::set<ItemId>(ids.begin(), ids.end()));
      std::vector<std::int64_t> back;
      for (const auto& id : ids) back.push_back(f.scores.at(id));
      out.require(relation_from_scores(ids, back) == induced,
                  "converse round trip, trial " + std::to_string(trial));
      ++converse;
    } catch (const std::exception& e) {
      out.require(false, std::string("derive_scores threw: ") + e.what());
    }
  }

  PreferenceRelation worked;
  worked.insert(item("a"), item("b"), Relation::Left);
  worked.insert(item("a"), item("c"), Relation::Left);
  worked.insert(item("b"), item("c"), Relation::Left);
  const auto f = derive_scores(worked, {item("a"), item("b"), item("c")});
  const bool example = f.scores == std::map<ItemId, std::int64_t>{
                                       {item("a"), 2}, {item("b"), 1}, {item("c"), 0}};
  out.require(example, "worked example scores");

  out.detail = std::to_string(forward) + " preorders, " + std::to_string(converse) +
               " score vectors (n <= 6); worked example f=(" +
               std::to_string(f.scores.at(item("a"))) + "," +
               std::to_string(f.scores.at(item("b"))) + "," +
               std::to_string(f.scores.at(item("c"))) + "); exact";
  return out;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome out;
  std::size_t checked = 0;
  for (Mode mode : {Mode::Weak, Mode::Strict}) {
    for (const auto& entry : enumerate_configs(mode)) {
      const bool oracle = transitive_by_values(entry.rels);
      out.require(is_transitive(entry.rels, mode) == oracle, "is_transitive disagrees");
      out.require(entry.transitive == oracle, "enumeration flag disagrees");
      ++checked;
    }
  }
  out.require(checked == 35, "config count");
  out.detail = std::to_string(checked) + " configs (27 weak + 8 strict) agree; exhaustive";
  return out;
}

// ---------------------------------------------------------------------------

Outcome scheduler_soundness() {
  Outcome out;
  const auto start = Clock::now();
  std::mt19937_64 rng(777);
  std::size_t runs = 0;

  for (std::uint64_t seed = 0; seed < 250; ++seed) {
    const std::size_t n = 2 + rng() % 11;
    const auto ids = items_named(n, "s");
    const bool strict = seed % 2 == 0;
    std::vector<std::int64_t> scores(n);
    if (strict) {
      std::iota(scores.begin(), scores.end(), 0);
      std::shuffle(scores.begin(), scores.end(), rng);
    } else {
      scores = random_scores(n, 1 + static_cast<std::int64_t>(rng() % n), rng);
    }
    GroundTruth truth;
    for (std::size_t i = 0; i < n; ++i) truth.emplace_back(ids[i], scores[i]);
    const auto expected = relation_from_scores(ids, scores);
    const Mode mode = strict ? Mode::Strict : Mode::Weak;

    for (auto strategy : {Strategy(RandomStrategy{seed}), Strategy(InsertionStrategy{})}) {
      const auto tag = "seed " + std::to_string(seed) + " n=" + std::to_string(n);
      const auto result = simulate_session(truth, mode, strategy);
      const auto final_rel = result.session.final_relation();
      out.require(final_rel == expected, "final relation differs, " + tag);
      const auto stats = result.session.stats();
      out.require(stats.pairs_asked + stats.pairs_inferred == n * (n - 1) / 2,
                  "pair accounting, " + tag);
      if (n >= 3) out.require(ia_kappa(final_rel, mode).kappa == Rational(1), "kappa, " + tag);
      ++runs;
    }
  }

  std::size_t worst = 0;
  const auto ids16 = items_named(16, "t");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> scores(16);
    std::iota(scores.begin(), scores.end(), 0);
    std::shuffle(scores.begin(), scores.end(), rng);
    GroundTruth truth;
    for (std::size_t i = 0; i < 16; ++i) truth.emplace_back(ids16[i], scores[i]);
    const auto result = simulate_session(truth, Mode::Strict, InsertionStrategy{});
    out.require(result.matches_ground_truth, "n=16 ground truth");
    worst = std::max(worst, result.session.stats().pairs_asked);
  }
  out.require(worst <= 49, "n=16 insertion asked " + std::to_string(worst));

  const double elapsed = seconds_since(start);
  out.require(elapsed < 30.0, "runtime");
  out.detail = std::to_string(runs) + " sessions (250 seeds x 2 strategies, n <= 12); n=16 "
               "insertion worst " + std::to_string(worst) + "/120 asked (<= 49); " +
               std::to_string(elapsed) + " s < 30 s";
  return out;
}

// ---------------------------------------------------------------------------

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args, const fs::path& scratch) {
  const auto out_file = scratch / "cli_stdout.txt";
  const std::string cmd = std::string("\"") + PREFIA_CLI + "\" " + args + " > \"" +
                          out_file.string() + "\" 2> \"" + (scratch / "cli_stderr.txt").string() +
                          "\"";
  const int raw = std::system(cmd.c_str());
  CommandResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = read_file(out_file.string());
  return r;
}

Dataset generated_dataset(std::mt19937_64& rng) {
  Dataset ds;
  const auto ids = items_named(7, "item ");
  std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
  std::uniform_int_distribution<int> rel(0, 2);
  std::set<std::tuple<std::string, std::string, ItemPair>> used;
  const int rows = 5 + static_cast<int>(rng() % 40);
  for (int k = 0; k < rows; ++k) {
    const auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    Judgment j{AnnotatorId(rng() % 2 ? "ann,1" : "ann \"2\""),
               Criterion(rng() % 2 ? "gram" : "fluency"), ids[a], ids[b],
               static_cast<Relation>(rel(rng))};
    // One judgment per pair, so every annotator is analyzable without conflicts.
    if (!used.emplace(j.annotator.str(), j.criterion.str(), ItemPair(j.left, j.right)).second)
      continue;
    if (rng() % 2) j.timestamp = Timestamp(std::chrono::milliseconds(1600000000123LL + k));
    ds.judgments.push_back(j);
  }
  for (const auto& j : ds.judgments) {
    for (const auto& id : {j.left, j.right})
      if (std::find(ds.items.begin(), ds.items.end(), id) == ds.items.end())
        ds.items.push_back(id);
    if (std::find(ds.annotators.begin(), ds.annotators.end(), j.annotator) ==
        ds.annotators.end())
      ds.annotators.push_back(j.annotator);
  }
  return ds;
}

Outcome cli_format_round_trip() {
  Outcome out;
  const auto scratch = fs::temp_directory_path() /
                       ("prefia_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(scratch);

  // Library round trip on generated datasets, both formats.
  std::mt19937_64 rng(99);
  std::size_t datasets = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto ds = generated_dataset(rng);
    for (DataFormat f : {DataFormat::Csv, DataFormat::Json}) {
      const auto text = write_judgments(ds, f);
      const auto once = parse_judgments(text, f);
      const auto twice = parse_judgments(write_judgments(once, f), f);
      out.require(once.judgments == ds.judgments, "parse(write(d)) != d");
      out.require(twice == once, "parse/write/parse not idempotent");
    }
    ++datasets;
  }

  // CLI on the bundled fixture.
  const auto table = run_cli("analyze --input \"" + fixture("three_annotators.csv") +
                                 "\" --mode weak --blocks \"" + fixture("three_annotators_blocks.txt") +
                                 "\" --format table",
                             scratch);
  out.require(table.status == 0, "cli analyze exit status");
  for (const char* row : {"A1         3/3      0.4815  1.0000", "A2         2/3      0.4815  0.3571",
                          "A3         1/3      0.4815  -0.2857"})
    out.require(table.output.find(row) != std::string::npos,
                std::string("cli table row missing: ") + row);

  const auto bad = run_cli("analyze --input \"" + fixture("bad_symbol.csv") + "\"", scratch);
  out.require(bad.status == 1, "bad input should exit 1");

  // CLI and service on identical inputs.
  Server server;
  const int port = server.bind("127.0.0.1", 0);
  std::thread thread([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  std::size_t compared = 0;

  std::vector<std::pair<std::string, DataFormat>> inputs{
      {read_file(fixture("three_annotators.csv")), DataFormat::Csv},
      {read_file(fixture("worked_example.csv")), DataFormat::Csv}};
  for (int k = 0; k < 10; ++k) {
    const auto ds = generated_dataset(rng);
    inputs.emplace_back(write_judgments(ds, k % 2 ? DataFormat::Json : DataFormat::Csv),
                        k % 2 ? DataFormat::Json : DataFormat::Csv);
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto& [text, format] = inputs[k];
    for (const char* mode : {"weak", "strict"}) {
      const auto path = scratch / ("input_" + std::to_string(k) +
                                   (format == DataFormat::Json ? ".json" : ".csv"));
      std::ofstream(path, std::ios::binary) << text;
      const auto cli = run_cli("analyze --input \"" + path.string() + "\" --mode " + mode +
                                   " --format json",
                               scratch);
      const auto res = client.Post(std::string("/analyze?mode=") + mode +
                                       "&format=" + (format == DataFormat::Json ? "json" : "csv"),
                                   text, "text/plain");
      const auto library = write_report(analyze(parse_judgments(text, format),
                                                std::string(mode) == "weak" ? Mode::Weak
                                                                            : Mode::Strict),
                                        ReportFormat::Json);
      out.require(cli.status == 0, "cli exit status, input " + std::to_string(k));
      out.require(res && res->status == 200, "service status, input " + std::to_string(k));
      out.require(res && res->body == cli.output,
                  "cli and service differ, input " + std::to_string(k) + " " + mode);
      out.require(cli.output == library, "cli and library differ, input " + std::to_string(k));
      ++compared;
    }
  }
  server.stop();
  thread.join();
  fs::remove_all(scratch);

  out.detail = std::to_string(datasets) + " generated datasets x 2 formats round trip; fixture "
               "table rows match; " + std::to_string(compared) +
               " CLI/service reports byte-identical";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"enumeration exactness", enumeration_exactness},
      {"expansion reconciliation", expansion_reconciliation},
      {"three-annotator kappa regression", kappa_regression},
      {"representation property suite", representation_property_suite},
      {"transitivity oracle equivalence", oracle_equivalence},
      {"scheduler soundness and savings", scheduler_soundness},
      {"CLI and format round trip", cli_format_round_trip},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (outcome.ok ? "PASS  " : "FAIL  ") << name << ": " << outcome.detail << "\n";
    for (const auto& f : outcome.failures) std::cout << "      - " << f << "\n";
    failed += outcome.ok ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
