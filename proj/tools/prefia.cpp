// prefia: command-line front end for preference consistency analysis,
// score derivation, session simulation and the HTTP service.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant failure.

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "prefia/io.hpp"
#include "prefia/representation.hpp"
#include "prefia/scheduler.hpp"
#include "prefia/service.hpp"

namespace {

using nlohmann::ordered_json;
using namespace prefia;

constexpr int kInputError = 1;
constexpr int kInternalError = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return in;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + output + "'");
  out << text;
}

Mode mode_of(const std::string& s) { return s == "strict" ? Mode::Strict : Mode::Weak; }

ConflictPolicy policy_of(const std::string& s) {
  return s == "keep-latest" ? ConflictPolicy::KeepLatest : ConflictPolicy::Error;
}

DataFormat input_format(const std::string& path, const std::string& requested) {
  if (requested == "csv") return DataFormat::Csv;
  if (requested == "json") return DataFormat::Json;
  return format_for_path(path);
}

struct AnalyzeArgs {
  std::string input, mode = "weak", blocks, output, format = "json",
                     conflicts = "error", input_format = "auto";
};

int run_analyze(const AnalyzeArgs& a) {
  auto in = open_input(a.input);
  const Dataset ds = parse_judgments(in, input_format(a.input, a.input_format));
  AnalyzeOptions options;
  options.conflicts = policy_of(a.conflicts);
  if (!a.blocks.empty()) {
    auto blocks_in = open_input(a.blocks);
    options.blocks = parse_blocks(blocks_in);
  }
  const auto report = analyze(ds, mode_of(a.mode), options);
  emit(write_report(report, a.format == "table" ? ReportFormat::Table : ReportFormat::Json),
       a.output);
  return 0;
}

struct ScoresArgs {
  std::string input, annotator, criterion, format = "table", conflicts = "error",
                                           input_format = "auto";
  std::int64_t scale = 1;
};

int run_scores(const ScoresArgs& a) {
  auto in = open_input(a.input);
  const Dataset ds = parse_judgments(in, input_format(a.input, a.input_format));
  const AnnotatorId annotator(a.annotator);
  const Criterion criterion(a.criterion);
  const auto relation = build_relation(ds.judgments, annotator, criterion, policy_of(a.conflicts));
  if (relation.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "no judgments for annotator '" + a.annotator + "' under criterion '" +
                    a.criterion + "'");
  }
  auto table = derive_scores(relation, relation.items());
  if (a.scale != 1) table = scale_scores(table, a.scale);

  if (a.format == "json") {
    ordered_json values = ordered_json::object();
    for (const auto& [item, score] : table.scores) values[item.str()] = score;
    ordered_json doc = {{"annotator", a.annotator},
                        {"criterion", a.criterion},
                        {"scale", table.scale},
                        {"scores", values}};
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::vector<std::pair<ItemId, std::int64_t>> rows(table.scores.begin(), table.scores.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::size_t width = 4;
  for (const auto& [item, s] : rows) width = std::max(width, item.str().size());
  std::cout << std::left << std::setw(static_cast<int>(width + 2)) << "Item" << "Score\n";
  for (const auto& [item, s] : rows) {
    std::cout << std::setw(static_cast<int>(width + 2)) << item.str() << s << "\n";
  }
  return 0;
}

struct SimulateArgs {
  std::size_t items = 0;
  std::string strategy = "random", mode = "weak", ground_truth, transcript;
  std::uint64_t seed = 0;
};

GroundTruth random_truth(std::size_t n, Mode mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> scores(n);
  if (mode == Mode::Strict) {
    std::iota(scores.begin(), scores.end(), 0);
    std::shuffle(scores.begin(), scores.end(), rng);
  } else {
    std::uniform_int_distribution<std::int64_t> draw(0, std::max<std::int64_t>(1, n / 2));
    for (auto& s : scores) s = draw(rng);
  }
  GroundTruth truth;
  for (std::size_t i = 0; i < n; ++i) {
    truth.emplace_back(ItemId("i" + std::to_string(i + 1)), scores[i]);
  }
  return truth;
}

int run_simulate(const SimulateArgs& a) {
  const Mode mode = mode_of(a.mode);
  GroundTruth truth;
  if (!a.ground_truth.empty()) {
    auto in = open_input(a.ground_truth);
    truth = parse_ground_truth(in);
    if (a.items != 0 && a.items != truth.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "--items does not match the ground-truth file (" +
                      std::to_string(truth.size()) + " items)");
    }
  } else {
    if (a.items < 2) throw Error(ErrorCode::TooFewItems, "--items must be at least 2");
    truth = random_truth(a.items, mode, a.seed);
  }
  if (mode == Mode::Strict) {
    std::map<std::int64_t, int> seen;
    for (const auto& [item, s] : truth) {
      if (++seen[s] > 1) {
        throw Error(ErrorCode::TieInStrictMode,
                    "ground truth ties item '" + item.str() + "' in strict mode");
      }
    }
  }
  Strategy strategy = a.strategy == "insertion" ? Strategy(InsertionStrategy{})
                                                : Strategy(RandomStrategy{a.seed});
  const auto result = simulate_session(truth, mode, strategy);
  const auto stats = result.session.stats();

  ordered_json truth_json = ordered_json::object();
  for (const auto& [item, s] : truth) truth_json[item.str()] = s;
  ordered_json asked = ordered_json::array();
  for (const auto& pr : result.session.asked()) {
    asked.push_back({pr.pair.first().str(), pr.pair.second().str(),
                     relation_symbol(pr.relation)});
  }
  ordered_json doc = {{"mode", a.mode},
                      {"strategy", a.strategy},
                      {"seed", a.seed},
                      {"ground_truth", truth_json},
                      {"stats",
                       {{"n_items", stats.n_items},
                        {"pairs_total", stats.pairs_total},
                        {"pairs_asked", stats.pairs_asked},
                        {"pairs_inferred", stats.pairs_inferred},
                        {"savings_ratio", stats.savings_ratio}}},
                      {"asked", asked},
                      {"matches_ground_truth", result.matches_ground_truth}};
  std::cout << doc.dump(2) << "\n";

  if (!a.transcript.empty()) {
    Dataset ds;
    ds.judgments = result.session.transcript(AnnotatorId("simulated"), Criterion("preference"));
    ds.items = result.session.items();
    ds.annotators = {AnnotatorId("simulated")};
    emit(write_judgments(ds, format_for_path(a.transcript)), a.transcript);
  }
  if (!result.matches_ground_truth) {
    throw InvariantViolation("final relation differs from the ground truth");
  }
  return 0;
}

struct ServeArgs {
  int port = 8080;
  std::string host = "127.0.0.1", static_dir, journal_dir;
};

Server* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  ServiceOptions options;
  if (!a.static_dir.empty()) options.static_dir = a.static_dir;
  if (!a.journal_dir.empty()) options.journal_dir = a.journal_dir;
  Server server(options);
  const int port = server.bind(a.host, a.port);
  if (port < 0) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot bind " + a.host + ":" + std::to_string(a.port));
  }
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << "listening on http://" << a.host << ":" << port << "\n";
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transitivity-based consistency analysis for pairwise preference annotations"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Per-annotator transitivity kappa report");
  analyze_cmd->add_option("--input", analyze_args.input, "Judgment file (CSV or JSON)")->required();
  analyze_cmd->add_option("--mode", analyze_args.mode)->check(CLI::IsMember({"weak", "strict"}));
  analyze_cmd->add_option("--blocks", analyze_args.blocks, "Designated triplet blocks");
  analyze_cmd->add_option("--output", analyze_args.output, "Output file (default stdout)");
  analyze_cmd->add_option("--format", analyze_args.format)->check(CLI::IsMember({"json", "table"}));
  analyze_cmd->add_option("--conflicts", analyze_args.conflicts)
      ->check(CLI::IsMember({"error", "keep-latest"}));
  analyze_cmd->add_option("--input-format", analyze_args.input_format)
      ->check(CLI::IsMember({"auto", "csv", "json"}));

  ScoresArgs scores_args;
  auto* scores_cmd = app.add_subcommand("scores", "Absolute scores from a consistent annotator");
  scores_cmd->add_option("--input", scores_args.input)->required();
  scores_cmd->add_option("--annotator", scores_args.annotator)->required();
  scores_cmd->add_option("--criterion", scores_args.criterion)->required();
  scores_cmd->add_option("--scale", scores_args.scale)->check(CLI::PositiveNumber);
  scores_cmd->add_option("--format", scores_args.format)->check(CLI::IsMember({"table", "json"}));
  scores_cmd->add_option("--conflicts", scores_args.conflicts)
      ->check(CLI::IsMember({"error", "keep-latest"}));
  scores_cmd->add_option("--input-format", scores_args.input_format)
      ->check(CLI::IsMember({"auto", "csv", "json"}));

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run an adaptive session against a simulated annotator");
  sim_cmd->add_option("--items", sim_args.items, "Number of items");
  sim_cmd->add_option("--strategy", sim_args.strategy)
      ->check(CLI::IsMember({"random", "insertion"}));
  sim_cmd->add_option("--seed", sim_args.seed);
  sim_cmd->add_option("--mode", sim_args.mode)->check(CLI::IsMember({"weak", "strict"}));
  sim_cmd->add_option("--ground-truth", sim_args.ground_truth, "item,score file");
  sim_cmd->add_option("--transcript", sim_args.transcript, "Write the session transcript here");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
  serve_cmd->add_option("--port", serve_args.port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve_args.host);
  serve_cmd->add_option("--static", serve_args.static_dir)->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--journal", serve_args.journal_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*analyze_cmd) return run_analyze(analyze_args);
    if (*scores_cmd) return run_scores(scores_args);
    if (*sim_cmd) return run_simulate(sim_args);
    if (*serve_cmd) return run_serve(serve_args);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kInputError;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return 0;
}
