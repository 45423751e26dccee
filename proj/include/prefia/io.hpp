#ifndef PREFIA_IO_HPP
#define PREFIA_IO_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefia/core.hpp"
#include "prefia/representation.hpp"
#include "prefia/transitivity.hpp"

namespace prefia {

inline constexpr int kFormatVersion = 1;

enum class DataFormat { Csv, Json };
enum class ReportFormat { Json, Table };

struct Dataset {
  std::vector<Judgment> judgments;
  std::vector<ItemId> items;            // roster, first-appearance order
  std::vector<AnnotatorId> annotators;  // roster, first-appearance order

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Relation symbols in files: "<" left preferred (ranks ahead of right),
// ">" right preferred, "~" tie; the words left/right/tie are also accepted.
Relation parse_relation_symbol(std::string_view text, std::size_t line = 0);
const char* relation_symbol(Relation r);

// ISO-8601 UTC, "YYYY-MM-DDTHH:MM:SS[.fff]Z".
Timestamp parse_timestamp(std::string_view text, std::size_t line = 0);
std::string format_timestamp(Timestamp t);

// Reads judgments. CSV: optional "# format_version: 1" line, then a header
// naming annotator,criterion,left,right,relation and optionally timestamp and
// source. JSON: an array of judgment records, or an object with
// "judgments" and optional "items"/"annotators" rosters.
// Throws ParseError, UnknownRelationSymbol or SelfPair with the line number.
Dataset parse_judgments(std::istream& in, DataFormat format);
Dataset parse_judgments(std::string_view text, DataFormat format);

std::string write_judgments(const Dataset& dataset, DataFormat format);

// Chooses JSON for *.json paths and CSV otherwise.
DataFormat format_for_path(std::string_view path);

// One triple per line, items separated by commas; '#' starts a comment.
std::vector<Triple> parse_blocks(std::istream& in);

// "item,score" lines (an "item,score" header is allowed); higher is better.
std::vector<std::pair<ItemId, std::int64_t>> parse_ground_truth(
    std::istream& in);

enum class EntryStatus { Assessed, NotAssessable, Error };
const char* to_string(EntryStatus s);

struct AnalysisEntry {
  AnnotatorId annotator;
  Criterion criterion;
  EntryStatus status = EntryStatus::Assessed;
  std::string detail;
  std::optional<IAReport> ia;
  std::optional<ScoreTable> scores;

  friend bool operator==(const AnalysisEntry&, const AnalysisEntry&) = default;
};

struct DatasetDigest {
  std::size_t judgments = 0;
  std::size_t items = 0;
  std::size_t annotators = 0;
  std::size_t criteria = 0;

  friend bool operator==(const DatasetDigest&, const DatasetDigest&) = default;
};

struct AnalysisReport {
  Mode mode = Mode::Weak;
  DatasetDigest digest;
  std::vector<AnalysisEntry> entries;  // sorted by (annotator, criterion)

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct AnalyzeOptions {
  std::optional<std::vector<Triple>> blocks;
  ConflictPolicy conflicts = ConflictPolicy::Error;
};

// Kappa report for every (annotator, criterion) in the dataset. Failures of
// a single annotator become Error entries; they never abort the analysis.
// Score tables are attached where the relation is complete over the item
// roster and transitive.
AnalysisReport analyze(const Dataset& dataset, Mode mode,
                       const AnalyzeOptions& options = {});

std::string write_report(const AnalysisReport& report, ReportFormat format);

// Inverse of write_report(..., Json).
AnalysisReport parse_report(std::string_view json);

}  // namespace prefia

#endif  // PREFIA_IO_HPP
