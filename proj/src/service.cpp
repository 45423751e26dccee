#include "prefia/service.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "prefia/io.hpp"
#include "prefia/scheduler.hpp"

namespace prefia {

using nlohmann::ordered_json;

namespace {

constexpr const char* kJson = "application/json";

struct HttpError {
  int status;
  std::string error;
  std::string detail;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::PairAlreadyDetermined:
    case ErrorCode::SessionNotDone:
      return 409;
    default:
      return 400;
  }
}

ordered_json pair_json(const ItemPair& p) {
  return {{"left", p.first().str()}, {"right", p.second().str()}};
}

ordered_json pair_relation_json(const PairRelation& pr) {
  return {{"left", pr.pair.first().str()},
          {"right", pr.pair.second().str()},
          {"relation", relation_symbol(pr.relation)}};
}

ordered_json stats_json(const SessionStats& s, SessionStatus status) {
  return {{"n_items", s.n_items},
          {"pairs_total", s.pairs_total},
          {"pairs_asked", s.pairs_asked},
          {"pairs_inferred", s.pairs_inferred},
          {"savings_ratio", s.savings_ratio},
          {"status", status == SessionStatus::Done ? "done" : "active"}};
}

ordered_json parse_body(const std::string& body) {
  try {
    auto doc = ordered_json::parse(body);
    if (!doc.is_object()) throw HttpError{400, "ParseError", "expected a JSON object"};
    return doc;
  } catch (const ordered_json::parse_error& e) {
    throw HttpError{400, "ParseError", e.what()};
  }
}

std::string string_field(const ordered_json& doc, const char* key,
                         std::optional<std::string> fallback = std::nullopt) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    if (fallback) return *fallback;
    throw HttpError{400, "InvalidArgument", std::string("missing field '") + key + "'"};
  }
  if (!it->is_string()) {
    throw HttpError{400, "InvalidArgument", std::string("field '") + key + "' must be a string"};
  }
  return it->get<std::string>();
}

Mode parse_mode(const std::string& s) {
  if (s == "weak") return Mode::Weak;
  if (s == "strict") return Mode::Strict;
  throw HttpError{400, "InvalidArgument", "mode must be 'weak' or 'strict'"};
}

std::string iso_now() {
  return format_timestamp(std::chrono::floor<std::chrono::milliseconds>(
      std::chrono::system_clock::now()));
}

// Parameters a session was created with; enough to replay it.
struct SessionSpec {
  std::vector<std::string> items;
  std::string mode = "weak";
  std::string strategy = "random";
  std::uint64_t seed = 0;
  std::string annotator = "annotator";
  std::string criterion = "preference";

  static SessionSpec from_json(const ordered_json& doc) {
    SessionSpec spec;
    auto items = doc.find("items");
    if (items == doc.end() || !items->is_array()) {
      throw HttpError{400, "InvalidArgument", "'items' must be an array of strings"};
    }
    for (const auto& v : *items) {
      if (!v.is_string() || v.get<std::string>().empty()) {
        throw HttpError{400, "InvalidArgument", "'items' must be non-empty strings"};
      }
      spec.items.push_back(v.get<std::string>());
    }
    spec.mode = string_field(doc, "mode", "weak");
    spec.strategy = string_field(doc, "strategy", "random");
    if (auto s = doc.find("seed"); s != doc.end() && !s->is_null()) {
      if (!s->is_number_unsigned() && !s->is_number_integer()) {
        throw HttpError{400, "InvalidArgument", "'seed' must be an integer"};
      }
      spec.seed = s->get<std::uint64_t>();
    }
    spec.annotator = string_field(doc, "annotator", "annotator");
    spec.criterion = string_field(doc, "criterion", "preference");
    if (spec.annotator.empty() || spec.criterion.empty()) {
      throw HttpError{400, "InvalidArgument", "annotator and criterion must be non-empty"};
    }
    return spec;
  }

  ordered_json to_json() const {
    return {{"items", items},         {"mode", mode},
            {"strategy", strategy},   {"seed", seed},
            {"annotator", annotator}, {"criterion", criterion}};
  }

  Session make() const {
    const Mode m = parse_mode(mode);
    Strategy s;
    if (strategy == "random") {
      s = RandomStrategy{seed};
    } else if (strategy == "insertion") {
      s = InsertionStrategy{};
    } else {
      throw HttpError{400, "InvalidArgument", "strategy must be 'random' or 'insertion'"};
    }
    std::vector<ItemId> ids;
    ids.reserve(items.size());
    for (const auto& i : items) ids.emplace_back(i);
    return Session(std::move(ids), m, s);
  }
};

struct SessionHandle {
  SessionHandle(std::string id, SessionSpec spec, std::string created)
      : session_id(std::move(id)),
        spec(std::move(spec)),
        session(this->spec.make()),
        created_at(std::move(created)) {}

  std::mutex mu;
  std::string session_id;
  SessionSpec spec;
  Session session;
  std::string created_at;
  std::ofstream journal;

  ordered_json next_json() {
    auto next = session.next_pair();
    return {{"next", next ? pair_json(*next) : ordered_json(nullptr)},
            {"done", !next.has_value()}};
  }

  void log(const ordered_json& event) {
    if (!journal.is_open()) return;
    journal << event.dump() << '\n';
    journal.flush();
  }
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    std::random_device rd;
    std::ostringstream nonce;
    nonce << std::hex << (rd() & 0xffffff);
    id_prefix = nonce.str();
    if (options.journal_dir) {
      std::filesystem::create_directories(*options.journal_dir);
      replay_journals();
    }
    install_routes();
  }

  ServiceOptions options;
  httplib::Server http;
  std::shared_mutex sessions_mu;
  std::map<std::string, std::shared_ptr<SessionHandle>> sessions;
  std::atomic<std::uint64_t> counter{0};
  std::string id_prefix;

  std::string next_id() {
    std::ostringstream id;
    id << "s" << id_prefix << "-" << ++counter;
    return id.str();
  }

  std::shared_ptr<SessionHandle> find(const std::string& id) {
    std::shared_lock lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) {
      throw HttpError{404, "UnknownSession", "no session with id '" + id + "'"};
    }
    return it->second;
  }

  std::filesystem::path journal_path(const std::string& id) const {
    return *options.journal_dir / (id + ".jsonl");
  }

  void replay_journals() {
    for (const auto& entry : std::filesystem::directory_iterator(*options.journal_dir)) {
      if (entry.path().extension() != ".jsonl") continue;
      std::ifstream in(entry.path());
      std::string line;
      std::shared_ptr<SessionHandle> handle;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto event = ordered_json::parse(line);
        const auto type = event.at("event").get<std::string>();
        if (type == "create") {
          handle = std::make_shared<SessionHandle>(
              event.at("session_id").get<std::string>(),
              SessionSpec::from_json(event.at("spec")),
              event.at("created_at").get<std::string>());
        } else if (type == "judgment" && handle) {
          handle->session.record(ItemId(event.at("left").get<std::string>()),
                                 ItemId(event.at("right").get<std::string>()),
                                 parse_relation_symbol(event.at("relation").get<std::string>()));
        }
      }
      if (!handle) continue;
      handle->journal.open(entry.path(), std::ios::app);
      sessions.emplace(handle->session_id, handle);
    }
  }

  ordered_json create(const std::string& body) {
    auto spec = SessionSpec::from_json(parse_body(body));
    auto handle = std::make_shared<SessionHandle>(next_id(), std::move(spec), iso_now());
    std::lock_guard session_lock(handle->mu);
    if (options.journal_dir) {
      handle->journal.open(journal_path(handle->session_id), std::ios::app);
      handle->log({{"event", "create"},
                   {"session_id", handle->session_id},
                   {"created_at", handle->created_at},
                   {"spec", handle->spec.to_json()}});
    }
    auto next = handle->next_json();
    ordered_json out = {{"session_id", handle->session_id},
                        {"created_at", handle->created_at},
                        {"first_pair", next["next"]},
                        {"done", next["done"]},
                        {"stats", stats_json(handle->session.stats(), handle->session.status())}};
    {
      std::unique_lock lock(sessions_mu);
      sessions.emplace(handle->session_id, handle);
    }
    return out;
  }

  ordered_json submit(const std::string& id, const std::string& body) {
    auto handle = find(id);
    const auto doc = parse_body(body);
    const ItemId left(string_field(doc, "left"));
    const ItemId right(string_field(doc, "right"));
    const auto rel_text = string_field(doc, "relation");
    const Relation rel = parse_relation_symbol(rel_text);

    std::lock_guard lock(handle->mu);
    const auto inferred = handle->session.record(left, right, rel);
    handle->log({{"event", "judgment"},
                 {"left", left.str()},
                 {"right", right.str()},
                 {"relation", relation_symbol(rel)},
                 {"at", iso_now()}});
    ordered_json out;
    out["inferred"] = ordered_json::array();
    for (const auto& pr : inferred) out["inferred"].push_back(pair_relation_json(pr));
    auto next = handle->next_json();
    out["next"] = next["next"];
    out["done"] = next["done"];
    out["stats"] = stats_json(handle->session.stats(), handle->session.status());
    return out;
  }

  ordered_json next(const std::string& id) {
    auto handle = find(id);
    std::lock_guard lock(handle->mu);
    return handle->next_json();
  }

  ordered_json stats(const std::string& id) {
    auto handle = find(id);
    std::lock_guard lock(handle->mu);
    return stats_json(handle->session.stats(), handle->session.status());
  }

  ordered_json relation(const std::string& id) {
    auto handle = find(id);
    std::lock_guard lock(handle->mu);
    const auto rel = handle->session.final_relation();
    ordered_json out;
    out["items"] = ordered_json::array();
    for (const auto& item : handle->session.items()) out["items"].push_back(item.str());
    out["pairs"] = ordered_json::array();
    for (const auto& [key, r] : rel.pairs()) {
      out["pairs"].push_back(pair_relation_json({key, r}));
    }
    return out;
  }

  std::string transcript(const std::string& id, DataFormat format) {
    auto handle = find(id);
    std::lock_guard lock(handle->mu);
    Dataset ds;
    ds.judgments = handle->session.transcript(AnnotatorId(handle->spec.annotator),
                                              Criterion(handle->spec.criterion));
    ds.items = handle->session.items();
    ds.annotators = {AnnotatorId(handle->spec.annotator)};
    return write_judgments(ds, format);
  }

  std::string analyze(const httplib::Request& req) {
    const Mode mode = parse_mode(req.has_param("mode") ? req.get_param_value("mode") : "weak");
    AnalyzeOptions options;
    if (req.has_param("conflicts")) {
      const auto c = req.get_param_value("conflicts");
      if (c == "error") {
        options.conflicts = ConflictPolicy::Error;
      } else if (c == "keep-latest") {
        options.conflicts = ConflictPolicy::KeepLatest;
      } else {
        throw HttpError{400, "InvalidArgument", "conflicts must be 'error' or 'keep-latest'"};
      }
    }
    DataFormat format = DataFormat::Csv;
    if (req.has_param("format")) {
      const auto f = req.get_param_value("format");
      if (f == "json") {
        format = DataFormat::Json;
      } else if (f != "csv") {
        throw HttpError{400, "InvalidArgument", "format must be 'csv' or 'json'"};
      }
    } else if (req.get_header_value("Content-Type").find("json") != std::string::npos) {
      format = DataFormat::Json;
    }
    const Dataset ds = parse_judgments(req.body, format);
    return write_report(analyze_dataset(ds, mode, options), ReportFormat::Json);
  }

  static AnalysisReport analyze_dataset(const Dataset& ds, Mode mode,
                                        const AnalyzeOptions& options) {
    return prefia::analyze(ds, mode, options);
  }

  template <class F>
  static void respond(httplib::Response& res, F&& body, int ok_status = 200) {
    try {
      if constexpr (std::is_same_v<std::invoke_result_t<F>, std::string>) {
        res.set_content(body(), kJson);
      } else {
        res.set_content(body().dump(2) + "\n", kJson);
      }
      res.status = ok_status;
    } catch (const HttpError& e) {
      fail(res, e.status, e.error, e.detail, 0);
    } catch (const Error& e) {
      fail(res, status_for(e.code()), to_string(e.code()), e.what(), e.line());
    } catch (const std::exception& e) {
      fail(res, 500, "Internal", e.what(), 0);
    }
  }

  static void fail(httplib::Response& res, int status, const std::string& error,
                   const std::string& detail, std::size_t line) {
    ordered_json body = {{"error", error}, {"detail", detail}};
    if (line) body["line"] = line;
    res.status = status;
    res.set_content(body.dump(2) + "\n", kJson);
  }

  void install_routes() {
    http.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      respond(res, [] { return ordered_json{{"status", "ok"}}; });
    });
    http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, [&] { return create(req.body); }, 201);
    });
    http.Get(R"(/sessions/([^/]+)/next)",
             [this](const httplib::Request& req, httplib::Response& res) {
               respond(res, [&] { return next(req.matches[1]); });
             });
    http.Post(R"(/sessions/([^/]+)/judgments)",
              [this](const httplib::Request& req, httplib::Response& res) {
                respond(res, [&] { return submit(req.matches[1], req.body); });
              });
    http.Get(R"(/sessions/([^/]+)/relation)",
             [this](const httplib::Request& req, httplib::Response& res) {
               respond(res, [&] { return relation(req.matches[1]); });
             });
    http.Get(R"(/sessions/([^/]+)/stats)",
             [this](const httplib::Request& req, httplib::Response& res) {
               respond(res, [&] { return stats(req.matches[1]); });
             });
    http.Get(R"(/sessions/([^/]+)/transcript)",
             [this](const httplib::Request& req, httplib::Response& res) {
               const bool csv = req.has_param("format") && req.get_param_value("format") == "csv";
               respond(res, [&] {
                 return transcript(req.matches[1], csv ? DataFormat::Csv : DataFormat::Json);
               });
               if (csv && res.status == 200) res.set_content(res.body, "text/csv");
             });
    http.Post("/analyze", [this](const httplib::Request& req, httplib::Response& res) {
      respond(res, [&] { return analyze(req); });
    });
    if (options.static_dir) http.set_mount_point("/", options.static_dir->string());
  }
};

Server::Server(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace prefia
