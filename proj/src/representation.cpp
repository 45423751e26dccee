#include "prefia/representation.hpp"

#include <algorithm>

namespace prefia {

CompletenessReport check_strongly_complete(const PreferenceRelation& relation,
                                           const std::set<ItemId>& items) {
  if (!std::includes(items.begin(), items.end(), relation.items().begin(),
                     relation.items().end())) {
    throw Error(ErrorCode::InvalidArgument,
                "relation mentions items outside the given item set");
  }
  CompletenessReport report;
  for (auto a = items.begin(); a != items.end(); ++a) {
    for (auto b = std::next(a); b != items.end(); ++b) {
      ItemPair key(*a, *b);
      if (!relation.pairs().contains(key)) report.missing_pairs.push_back(key);
    }
  }
  report.complete = report.missing_pairs.empty();
  return report;
}

TransitivityReport check_transitive(const PreferenceRelation& relation) {
  TransitivityReport report;
  for (const TripletConfig& config : complete_triples(relation)) {
    if (!is_transitive(config, Mode::Weak)) report.violations.push_back(config);
  }
  report.transitive = report.violations.empty();
  return report;
}

bool represents(const ScoreTable& table, const PreferenceRelation& relation) {
  for (const ItemId& item : relation.items()) {
    if (!table.scores.contains(item)) return false;
  }
  for (const auto& [key, rel] : relation.pairs()) {
    const auto fx = table.scores.at(key.first());
    const auto fy = table.scores.at(key.second());
    const bool x_over_y = rel != Relation::Right;
    const bool y_over_x = rel != Relation::Left;
    if (x_over_y != (fx >= fy) || y_over_x != (fy >= fx)) return false;
  }
  return true;
}

ScoreTable derive_scores(const PreferenceRelation& relation,
                         const std::set<ItemId>& items) {
  auto completeness = check_strongly_complete(relation, items);
  if (!completeness.complete) {
    std::string detail;
    for (const auto& p : completeness.missing_pairs) {
      if (!detail.empty()) detail += ' ';
      detail += to_string(p);
      if (detail.size() > 200) {
        detail += " ...";
        break;
      }
    }
    throw Error(ErrorCode::NotComplete,
                "relation is not strongly complete; missing pairs: " + detail);
  }
  auto transitivity = check_transitive(relation);
  if (!transitivity.transitive) {
    const auto& t = transitivity.violations.front().items;
    throw Error(ErrorCode::NotTransitive,
                "relation is not transitive; " +
                    std::to_string(transitivity.violations.size()) +
                    " violating triple(s), first: " + t[0].str() + "," +
                    t[1].str() + "," + t[2].str());
  }

  ScoreTable table;
  for (const ItemId& x : items) table.scores.emplace(x, 0);
  for (const auto& [key, rel] : relation.pairs()) {
    if (rel != Relation::Right) ++table.scores[key.first()];
    if (rel != Relation::Left) ++table.scores[key.second()];
  }

  if (!represents(table, relation)) {
    throw InvariantViolation(
        "derived scores do not represent a complete transitive relation");
  }
  return table;
}

ScoreTable scale_scores(const ScoreTable& table, std::int64_t n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidArgument, "scale factor must be >= 1");
  }
  ScoreTable out{{}, table.scale * n};
  for (const auto& [item, score] : table.scores) out.scores.emplace(item, score * n);

  // Scaling must preserve the order between every pair of items.
  for (auto a = table.scores.begin(); a != table.scores.end(); ++a) {
    for (auto b = std::next(a); b != table.scores.end(); ++b) {
      const auto before = a->second <=> b->second;
      const auto after = out.scores.at(a->first) <=> out.scores.at(b->first);
      if (before != after) {
        throw InvariantViolation("scaling changed the order of scores");
      }
    }
  }
  return out;
}

}  // namespace prefia
