#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "prefia/io.hpp"

namespace prefia {

using nlohmann::ordered_json;

Relation parse_relation_symbol(std::string_view text, std::size_t line) {
  if (text == "<" || text == "left") return Relation::Left;
  if (text == ">" || text == "right") return Relation::Right;
  if (text == "~" || text == "tie") return Relation::Tie;
  throw Error(ErrorCode::UnknownRelationSymbol,
              (line ? "line " + std::to_string(line) + ": " : std::string()) +
                  "unknown relation symbol '" + std::string(text) +
                  "' (expected <, >, ~, left, right or tie)",
              line);
}

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::Left: return "<";
    case Relation::Right: return ">";
    case Relation::Tie: return "~";
  }
  return "?";
}

namespace {

std::string line_prefix(std::size_t line) {
  return line ? "line " + std::to_string(line) + ": " : std::string();
}

int digits(std::string_view s, std::size_t pos, std::size_t len, bool& ok) {
  int v = 0;
  if (pos + len > s.size()) {
    ok = false;
    return 0;
  }
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') ok = false;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text, std::size_t line) {
  using namespace std::chrono;
  bool ok = text.size() >= 20 && text[4] == '-' && text[7] == '-' &&
            (text[10] == 'T' || text[10] == ' ') && text[13] == ':' &&
            text[16] == ':' && text.back() == 'Z';
  const int y = digits(text, 0, 4, ok);
  const int mo = digits(text, 5, 2, ok);
  const int d = digits(text, 8, 2, ok);
  const int h = digits(text, 11, 2, ok);
  const int mi = digits(text, 14, 2, ok);
  const int s = digits(text, 17, 2, ok);
  int ms = 0;
  if (ok && text.size() != 20) {
    // ".f", ".ff" or ".fff" before the trailing Z
    const std::size_t frac_len = text.size() - 21;
    ok = text[19] == '.' && frac_len >= 1 && frac_len <= 3;
    ms = digits(text, 20, frac_len, ok);
    for (std::size_t i = frac_len; i < 3; ++i) ms *= 10;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ok || !ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::ParseError,
                line_prefix(line) + "invalid timestamp '" + std::string(text) +
                    "' (expected YYYY-MM-DDTHH:MM:SS[.fff]Z)",
                line);
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  const long long ms = tod.subseconds().count();
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()),
                static_cast<long long>(tod.hours().count()),
                static_cast<long long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  std::string out = buf;
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, ".%03lld", ms);
    out += buf;
  }
  return out + "Z";
}

DataFormat format_for_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot != std::string_view::npos) {
    std::string ext(path.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == "json") return DataFormat::Json;
  }
  return DataFormat::Csv;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits one CSV record. Quoted fields may contain commas and doubled
// quotes; unquoted fields are trimmed.
std::vector<std::string> split_csv(std::string_view line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (true) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::string field;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        field += line[i++];
      }
      if (!closed) {
        throw Error(ErrorCode::ParseError,
                    line_prefix(lineno) + "unterminated quoted field", lineno);
      }
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i < line.size() && line[i] != ',') {
        throw Error(ErrorCode::ParseError,
                    line_prefix(lineno) + "unexpected text after quoted field",
                    lineno);
      }
    } else {
      const auto comma = line.find(',', i);
      const auto end = comma == std::string_view::npos ? line.size() : comma;
      field = std::string(trim(line.substr(i, end - i)));
      i = end;
    }
    fields.push_back(std::move(field));
    if (i >= line.size()) break;
    ++i;  // skip comma
  }
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find('\n') != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "CSV fields cannot contain line breaks: '" + s + "'");
  }
  const bool quote = s.find_first_of(",\"") != std::string::npos ||
                     s.front() == ' ' || s.back() == ' ' || s.front() == '#' ||
                     s.front() == '\t' || s.back() == '\t';
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

JudgmentSource parse_source(std::string_view text, std::size_t line) {
  if (text == "asked") return JudgmentSource::Asked;
  if (text == "inferred") return JudgmentSource::Inferred;
  throw Error(ErrorCode::ParseError,
              line_prefix(line) + "unknown source '" + std::string(text) +
                  "' (expected asked or inferred)",
              line);
}

template <class Id>
Id make_id(std::string value, const char* field, std::size_t line) {
  if (value.empty()) {
    throw Error(ErrorCode::ParseError,
                line_prefix(line) + "empty " + field, line);
  }
  return Id(std::move(value));
}

Judgment make_judgment(std::string annotator, std::string criterion,
                       std::string left, std::string right,
                       std::string_view relation,
                       std::optional<std::string_view> timestamp,
                       std::optional<std::string_view> source,
                       std::size_t line) {
  Judgment j{make_id<AnnotatorId>(std::move(annotator), "annotator", line),
             make_id<Criterion>(std::move(criterion), "criterion", line),
             make_id<ItemId>(std::move(left), "left item", line),
             make_id<ItemId>(std::move(right), "right item", line),
             parse_relation_symbol(relation, line)};
  if (j.left == j.right) {
    throw Error(ErrorCode::SelfPair,
                line_prefix(line) + "item '" + j.left.str() +
                    "' compared with itself",
                line);
  }
  if (timestamp && !timestamp->empty()) j.timestamp = parse_timestamp(*timestamp, line);
  if (source && !source->empty()) j.source = parse_source(*source, line);
  return j;
}

void add_to_rosters(Dataset& ds, const Judgment& j,
                    std::set<ItemId>& items, std::set<AnnotatorId>& annotators) {
  for (const ItemId* item : {&j.left, &j.right}) {
    if (items.insert(*item).second) ds.items.push_back(*item);
  }
  if (annotators.insert(j.annotator).second) ds.annotators.push_back(j.annotator);
}

void check_version(int version, std::size_t line) {
  if (version != kFormatVersion) {
    throw Error(ErrorCode::ParseError,
                line_prefix(line) + "unsupported format_version " +
                    std::to_string(version),
                line);
  }
}

Dataset parse_csv(std::istream& in) {
  static const std::vector<std::string> kRequired{"annotator", "criterion",
                                                  "left", "right", "relation"};
  Dataset ds;
  std::set<ItemId> items;
  std::set<AnnotatorId> annotators;
  std::map<std::string, std::size_t> column;
  bool have_header = false;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line = trim(line.substr(3));
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      if (body.starts_with("format_version:")) {
        auto value = trim(body.substr(15));
        int version = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), version);
        if (ec != std::errc() || p != value.data() + value.size()) {
          throw Error(ErrorCode::ParseError,
                      line_prefix(lineno) + "malformed format_version", lineno);
        }
        check_version(version, lineno);
      }
      continue;
    }

    auto fields = split_csv(line, lineno);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& name = fields[i];
        const bool known = std::find(kRequired.begin(), kRequired.end(), name) !=
                               kRequired.end() ||
                           name == "timestamp" || name == "source";
        if (!known) {
          throw Error(ErrorCode::ParseError,
                      line_prefix(lineno) + "unknown column '" + name + "'", lineno);
        }
        if (!column.emplace(name, i).second) {
          throw Error(ErrorCode::ParseError,
                      line_prefix(lineno) + "duplicate column '" + name + "'", lineno);
        }
      }
      for (const auto& name : kRequired) {
        if (!column.contains(name)) {
          throw Error(ErrorCode::ParseError,
                      line_prefix(lineno) + "header is missing column '" + name + "'",
                      lineno);
        }
      }
      have_header = true;
      continue;
    }

    if (fields.size() != column.size()) {
      throw Error(ErrorCode::ParseError,
                  line_prefix(lineno) + "expected " + std::to_string(column.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  lineno);
    }
    auto get = [&](const char* name) -> std::optional<std::string_view> {
      auto it = column.find(name);
      if (it == column.end()) return std::nullopt;
      return std::string_view(fields[it->second]);
    };
    Judgment j = make_judgment(std::string(*get("annotator")),
                               std::string(*get("criterion")),
                               std::string(*get("left")),
                               std::string(*get("right")), *get("relation"),
                               get("timestamp"), get("source"), lineno);
    add_to_rosters(ds, j, items, annotators);
    ds.judgments.push_back(std::move(j));
  }
  if (!have_header) {
    throw Error(ErrorCode::ParseError, "missing CSV header line", lineno + 1);
  }
  return ds;
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + offset, '\n'));
}

std::string require_string(const ordered_json& record, const char* key,
                           std::size_t index) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw Error(ErrorCode::ParseError,
                "record " + std::to_string(index) + ": missing string field '" +
                    key + "'",
                index);
  }
  return it->get<std::string>();
}

Dataset parse_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    const std::size_t line = line_of_offset(text, e.byte ? e.byte - 1 : 0);
    throw Error(ErrorCode::ParseError,
                line_prefix(line) + "malformed JSON: " + e.what(), line);
  }

  const ordered_json* records = &doc;
  std::optional<std::vector<std::string>> item_roster, annotator_roster;
  if (doc.is_object()) {
    if (auto v = doc.find("format_version"); v != doc.end()) {
      if (!v->is_number_integer()) {
        throw Error(ErrorCode::ParseError, "format_version must be an integer");
      }
      check_version(v->get<int>(), 0);
    }
    auto it = doc.find("judgments");
    if (it == doc.end() || !it->is_array()) {
      throw Error(ErrorCode::ParseError, "expected a \"judgments\" array");
    }
    records = &*it;
    try {
      if (auto r = doc.find("items"); r != doc.end())
        item_roster = r->get<std::vector<std::string>>();
      if (auto r = doc.find("annotators"); r != doc.end())
        annotator_roster = r->get<std::vector<std::string>>();
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  std::string("rosters must be arrays of strings: ") + e.what());
    }
  } else if (!doc.is_array()) {
    throw Error(ErrorCode::ParseError,
                "expected an array of judgment records or a dataset object");
  }

  Dataset ds;
  std::set<ItemId> items;
  std::set<AnnotatorId> annotators;
  if (item_roster) {
    for (auto& s : *item_roster) {
      ItemId id = make_id<ItemId>(s, "roster item", 0);
      if (!items.insert(id).second) {
        throw Error(ErrorCode::ParseError, "duplicate roster item '" + s + "'");
      }
      ds.items.push_back(std::move(id));
    }
  }
  if (annotator_roster) {
    for (auto& s : *annotator_roster) {
      AnnotatorId id = make_id<AnnotatorId>(s, "roster annotator", 0);
      if (!annotators.insert(id).second) {
        throw Error(ErrorCode::ParseError, "duplicate roster annotator '" + s + "'");
      }
      ds.annotators.push_back(std::move(id));
    }
  }

  std::size_t index = 0;
  for (const auto& record : *records) {
    ++index;
    if (!record.is_object()) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(index) + ": expected an object", index);
    }
    auto optional_field = [&](const char* key) -> std::optional<std::string> {
      auto it = record.find(key);
      if (it == record.end() || it->is_null()) return std::nullopt;
      if (!it->is_string()) {
        throw Error(ErrorCode::ParseError,
                    "record " + std::to_string(index) + ": field '" + key +
                        "' must be a string",
                    index);
      }
      return it->get<std::string>();
    };
    const auto relation = require_string(record, "relation", index);
    const auto timestamp = optional_field("timestamp");
    const auto source = optional_field("source");
    Judgment j = make_judgment(require_string(record, "annotator", index),
                               require_string(record, "criterion", index),
                               require_string(record, "left", index),
                               require_string(record, "right", index), relation,
                               timestamp, source, index);
    if (item_roster && (!items.contains(j.left) || !items.contains(j.right))) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(index) + ": item not in roster",
                  index);
    }
    if (annotator_roster && !annotators.contains(j.annotator)) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(index) + ": annotator not in roster",
                  index);
    }
    add_to_rosters(ds, j, items, annotators);
    ds.judgments.push_back(std::move(j));
  }
  return ds;
}

}  // namespace

Dataset parse_judgments(std::string_view text, DataFormat format) {
  if (format == DataFormat::Json) return parse_json(text);
  std::istringstream in{std::string(text)};
  return parse_csv(in);
}

Dataset parse_judgments(std::istream& in, DataFormat format) {
  if (format == DataFormat::Csv) return parse_csv(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

std::string write_judgments(const Dataset& dataset, DataFormat format) {
  const bool any_timestamp = std::any_of(
      dataset.judgments.begin(), dataset.judgments.end(),
      [](const Judgment& j) { return j.timestamp.has_value(); });
  const bool any_source =
      std::any_of(dataset.judgments.begin(), dataset.judgments.end(),
                  [](const Judgment& j) { return j.source.has_value(); });

  if (format == DataFormat::Csv) {
    std::string out = "# format_version: " + std::to_string(kFormatVersion) + "\n";
    out += "annotator,criterion,left,right,relation";
    if (any_timestamp) out += ",timestamp";
    if (any_source) out += ",source";
    out += '\n';
    for (const auto& j : dataset.judgments) {
      out += csv_field(j.annotator.str()) + ',' + csv_field(j.criterion.str()) +
             ',' + csv_field(j.left.str()) + ',' + csv_field(j.right.str()) +
             ',' + relation_symbol(j.relation);
      if (any_timestamp) {
        out += ',';
        if (j.timestamp) out += format_timestamp(*j.timestamp);
      }
      if (any_source) {
        out += ',';
        if (j.source) out += to_string(*j.source);
      }
      out += '\n';
    }
    return out;
  }

  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["items"] = ordered_json::array();
  for (const auto& i : dataset.items) doc["items"].push_back(i.str());
  doc["annotators"] = ordered_json::array();
  for (const auto& a : dataset.annotators) doc["annotators"].push_back(a.str());
  doc["judgments"] = ordered_json::array();
  for (const auto& j : dataset.judgments) {
    ordered_json r;
    r["annotator"] = j.annotator.str();
    r["criterion"] = j.criterion.str();
    r["left"] = j.left.str();
    r["right"] = j.right.str();
    r["relation"] = relation_symbol(j.relation);
    if (j.timestamp) r["timestamp"] = format_timestamp(*j.timestamp);
    if (j.source) r["source"] = to_string(*j.source);
    doc["judgments"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

std::vector<Triple> parse_blocks(std::istream& in) {
  std::vector<Triple> blocks;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv(line, lineno);
    if (fields.size() != 3) {
      throw Error(ErrorCode::ParseError,
                  line_prefix(lineno) + "a block needs exactly three items",
                  lineno);
    }
    Triple t{make_id<ItemId>(fields[0], "item", lineno),
             make_id<ItemId>(fields[1], "item", lineno),
             make_id<ItemId>(fields[2], "item", lineno)};
    try {
      blocks.push_back(canonical_triple(t));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, line_prefix(lineno) + e.what(), lineno);
    }
  }
  return blocks;
}

std::vector<std::pair<ItemId, std::int64_t>> parse_ground_truth(std::istream& in) {
  std::vector<std::pair<ItemId, std::int64_t>> out;
  std::set<ItemId> seen;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv(line, lineno);
    if (out.empty() && fields.size() == 2 && fields[0] == "item" &&
        fields[1] == "score") {
      continue;
    }
    if (fields.size() != 2) {
      throw Error(ErrorCode::ParseError,
                  line_prefix(lineno) + "expected 'item,score'", lineno);
    }
    std::int64_t score = 0;
    const auto& s = fields[1];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
      throw Error(ErrorCode::ParseError,
                  line_prefix(lineno) + "score must be an integer", lineno);
    }
    ItemId id = make_id<ItemId>(fields[0], "item", lineno);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::ParseError,
                  line_prefix(lineno) + "duplicate item '" + id.str() + "'", lineno);
    }
    out.emplace_back(std::move(id), score);
  }
  return out;
}

}  // namespace prefia
