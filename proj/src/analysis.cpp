#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "prefia/io.hpp"

namespace prefia {

using nlohmann::ordered_json;

const char* to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::Assessed: return "assessed";
    case EntryStatus::NotAssessable: return "not_assessable";
    case EntryStatus::Error: return "error";
  }
  return "?";
}

AnalysisReport analyze(const Dataset& dataset, Mode mode,
                       const AnalyzeOptions& options) {
  AnalysisReport report;
  report.mode = mode;

  std::set<ItemId> roster(dataset.items.begin(), dataset.items.end());
  std::set<AnnotatorId> annotators(dataset.annotators.begin(),
                                   dataset.annotators.end());
  std::set<std::pair<AnnotatorId, Criterion>> groups;
  std::set<Criterion> criteria;
  for (const Judgment& j : dataset.judgments) {
    roster.insert(j.left);
    roster.insert(j.right);
    annotators.insert(j.annotator);
    criteria.insert(j.criterion);
    groups.emplace(j.annotator, j.criterion);
  }
  report.digest = {dataset.judgments.size(), roster.size(), annotators.size(),
                   criteria.size()};

  for (const auto& [annotator, criterion] : groups) {
    AnalysisEntry entry{annotator, criterion, EntryStatus::Assessed, {}, std::nullopt, std::nullopt};
    try {
      const PreferenceRelation relation = build_relation(
          dataset.judgments, annotator, criterion, options.conflicts, roster);
      assert_mode(relation, mode);

      if (complete_triples(relation, options.blocks).empty()) {
        entry.status = EntryStatus::NotAssessable;
        entry.detail = "no complete triple";
      } else {
        IAReport ia = ia_kappa(relation, mode, options.blocks);
        ia.annotator = annotator;
        ia.criterion = criterion;
        entry.ia = std::move(ia);
      }

      if (check_strongly_complete(relation, roster).complete &&
          check_transitive(relation).transitive) {
        entry.scores = derive_scores(relation, roster);
      }
    } catch (const Error& e) {
      entry.status = EntryStatus::Error;
      entry.detail = std::string(to_string(e.code())) + ": " + e.what();
      entry.ia.reset();
      entry.scores.reset();
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

namespace {

ordered_json rational_json(const Rational& r) {
  return {{"exact", to_fraction_string(r)}, {"decimal", to_decimal_string(r)}};
}

Rational rational_from(const ordered_json& j) {
  return parse_fraction(j.at("exact").get<std::string>());
}

Mode mode_from(const std::string& s) {
  if (s == "weak") return Mode::Weak;
  if (s == "strict") return Mode::Strict;
  throw Error(ErrorCode::ParseError, "unknown mode '" + s + "'");
}

EntryStatus status_from(const std::string& s) {
  if (s == "assessed") return EntryStatus::Assessed;
  if (s == "not_assessable") return EntryStatus::NotAssessable;
  if (s == "error") return EntryStatus::Error;
  throw Error(ErrorCode::ParseError, "unknown entry status '" + s + "'");
}

std::string report_json(const AnalysisReport& report) {
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["mode"] = to_string(report.mode);
  doc["digest"] = {{"judgments", report.digest.judgments},
                   {"items", report.digest.items},
                   {"annotators", report.digest.annotators},
                   {"criteria", report.digest.criteria}};
  doc["entries"] = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json entry;
    entry["annotator"] = e.annotator.str();
    entry["criterion"] = e.criterion.str();
    entry["status"] = to_string(e.status);
    entry["detail"] = e.detail;
    if (e.ia) {
      entry["ia"] = {{"mode", to_string(e.ia->mode)},
                     {"triples_total", e.ia->triples_total},
                     {"triples_transitive", e.ia->triples_transitive},
                     {"p_a", rational_json(e.ia->p_a)},
                     {"p_e", rational_json(e.ia->p_e)},
                     {"kappa", rational_json(e.ia->kappa)},
                     {"strict_mode_warning", e.ia->strict_mode_warning}};
    } else {
      entry["ia"] = nullptr;
    }
    if (e.scores) {
      ordered_json values = ordered_json::object();
      for (const auto& [item, score] : e.scores->scores) values[item.str()] = score;
      entry["scores"] = {{"scale", e.scores->scale}, {"values", std::move(values)}};
    } else {
      entry["scores"] = nullptr;
    }
    doc["entries"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string report_table(const AnalysisReport& report) {
  std::map<Criterion, std::vector<const AnalysisEntry*>> by_criterion;
  for (const auto& e : report.entries) by_criterion[e.criterion].push_back(&e);

  std::ostringstream out;
  out << "mode: " << to_string(report.mode) << "\n";
  if (report.entries.empty()) {
    out << "(no annotators)\n";
    return out.str();
  }
  if (report.mode == Mode::Strict) {
    out << "warning: chance agreement is 3/4 under strict preferences; kappa "
           "discriminates poorly\n";
  }

  for (const auto& [criterion, entries] : by_criterion) {
    std::size_t width = std::string("Annotator").size();
    for (const auto* e : entries) width = std::max(width, e->annotator.str().size());
    width += 2;

    out << "\ncriterion: " << criterion.str() << "\n";
    out << pad("Annotator", width) << pad("P(A)", 9) << pad("P(E)", 8) << "K\n";
    std::vector<const AnalysisEntry*> skipped;
    for (const auto* e : entries) {
      if (!e->ia) {
        skipped.push_back(e);
        continue;
      }
      const std::string pa = std::to_string(e->ia->triples_transitive) + "/" +
                             std::to_string(e->ia->triples_total);
      out << pad(e->annotator.str(), width) << pad(pa, 9)
          << pad(to_decimal_string(e->ia->p_e), 8)
          << to_decimal_string(e->ia->kappa) << "\n";
    }
    for (const auto* e : skipped) {
      out << pad(e->annotator.str(), width) << to_string(e->status) << ": "
          << e->detail << "\n";
    }
  }

  bool any_scores = false;
  for (const auto& e : report.entries) {
    if (!e.scores) continue;
    if (!any_scores) out << "\nscores:\n";
    any_scores = true;
    out << "  " << e.annotator.str() << " (" << e.criterion.str() << "):";
    for (const auto& [item, score] : e.scores->scores) {
      out << " " << item.str() << "=" << score;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string write_report(const AnalysisReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? report_json(report) : report_table(report);
}

AnalysisReport parse_report(std::string_view json) {
  try {
    const auto doc = ordered_json::parse(json);
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::ParseError, "unsupported report format_version");
    }
    AnalysisReport report;
    report.mode = mode_from(doc.at("mode").get<std::string>());
    const auto& digest = doc.at("digest");
    report.digest = {digest.at("judgments").get<std::size_t>(),
                     digest.at("items").get<std::size_t>(),
                     digest.at("annotators").get<std::size_t>(),
                     digest.at("criteria").get<std::size_t>()};
    for (const auto& e : doc.at("entries")) {
      AnalysisEntry entry{AnnotatorId(e.at("annotator").get<std::string>()),
                          Criterion(e.at("criterion").get<std::string>()),
                          EntryStatus::Assessed, {}, std::nullopt, std::nullopt};
      entry.status = status_from(e.at("status").get<std::string>());
      entry.detail = e.at("detail").get<std::string>();
      if (const auto& ia = e.at("ia"); !ia.is_null()) {
        IAReport r;
        r.annotator = entry.annotator;
        r.criterion = entry.criterion;
        r.mode = mode_from(ia.at("mode").get<std::string>());
        r.triples_total = ia.at("triples_total").get<std::size_t>();
        r.triples_transitive = ia.at("triples_transitive").get<std::size_t>();
        r.p_a = rational_from(ia.at("p_a"));
        r.p_e = rational_from(ia.at("p_e"));
        r.kappa = rational_from(ia.at("kappa"));
        r.strict_mode_warning = ia.at("strict_mode_warning").get<bool>();
        entry.ia = std::move(r);
      }
      if (const auto& s = e.at("scores"); !s.is_null()) {
        ScoreTable table;
        table.scale = s.at("scale").get<std::int64_t>();
        for (const auto& [item, score] : s.at("values").items()) {
          table.scores.emplace(ItemId(item), score.get<std::int64_t>());
        }
        entry.scores = std::move(table);
      }
      report.entries.push_back(std::move(entry));
    }
    return report;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
}

}  // namespace prefia
