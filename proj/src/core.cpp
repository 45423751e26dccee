#include "prefia/core.hpp"

#include <algorithm>

namespace prefia {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConflictingJudgment: return "ConflictingJudgment";
    case ErrorCode::TieInStrictMode: return "TieInStrictMode";
    case ErrorCode::NoCompleteTriples: return "NoCompleteTriples";
    case ErrorCode::NotComplete: return "NotComplete";
    case ErrorCode::NotTransitive: return "NotTransitive";
    case ErrorCode::DuplicateItems: return "DuplicateItems";
    case ErrorCode::TooFewItems: return "TooFewItems";
    case ErrorCode::PairAlreadyDetermined: return "PairAlreadyDetermined";
    case ErrorCode::UnknownPair: return "UnknownPair";
    case ErrorCode::SessionNotDone: return "SessionNotDone";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownRelationSymbol: return "UnknownRelationSymbol";
    case ErrorCode::SelfPair: return "SelfPair";
  }
  return "Unknown";
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Left: return "left";
    case Relation::Right: return "right";
    case Relation::Tie: return "tie";
  }
  return "?";
}

const char* to_string(Mode m) { return m == Mode::Strict ? "strict" : "weak"; }

const char* to_string(JudgmentSource s) {
  return s == JudgmentSource::Asked ? "asked" : "inferred";
}

ItemPair::ItemPair(const ItemId& a, const ItemId& b)
    : first_(std::min(a, b)), second_(std::max(a, b)) {
  if (a == b) {
    throw Error(ErrorCode::SelfPair,
                "an item cannot be compared with itself: " + a.str());
  }
}

std::string to_string(const ItemPair& p) {
  return "{" + p.first().str() + "," + p.second().str() + "}";
}

PreferenceRelation::PreferenceRelation(std::set<ItemId> items)
    : items_(std::move(items)) {}

namespace {

// Rewrites `left rel right` as a canonical pair plus relation from first().
std::pair<ItemPair, Relation> canonical(const ItemId& left,
                                        const ItemId& right, Relation rel) {
  ItemPair key(left, right);
  return {key, key.first() == left ? rel : flip(rel)};
}

}  // namespace

bool PreferenceRelation::insert(const ItemId& left, const ItemId& right,
                                Relation rel) {
  auto [key, r] = canonical(left, right, rel);
  auto [it, inserted] = pairs_.emplace(key, r);
  if (!inserted && it->second != r) {
    throw Error(ErrorCode::ConflictingJudgment,
                "conflicting judgments for pair " + to_string(key));
  }
  if (inserted) {
    items_.insert(left);
    items_.insert(right);
  }
  return inserted;
}

void PreferenceRelation::assign(const ItemId& left, const ItemId& right,
                                Relation rel) {
  auto [key, r] = canonical(left, right, rel);
  pairs_.insert_or_assign(key, r);
  items_.insert(left);
  items_.insert(right);
}

std::optional<Relation> PreferenceRelation::get(const ItemId& a,
                                                const ItemId& b) const {
  if (a == b) return std::nullopt;
  ItemPair key(a, b);
  auto it = pairs_.find(key);
  if (it == pairs_.end()) return std::nullopt;
  return key.first() == a ? it->second : flip(it->second);
}

bool PreferenceRelation::weakly_prefers(const ItemId& a,
                                        const ItemId& b) const {
  auto r = get(a, b);
  return r && *r != Relation::Right;
}

std::vector<Judgment> PreferenceRelation::to_judgments(
    const AnnotatorId& annotator, const Criterion& criterion) const {
  std::vector<Judgment> out;
  out.reserve(pairs_.size());
  for (const auto& [key, rel] : pairs_) {
    out.push_back(Judgment{annotator, criterion, key.first(), key.second(),
                           rel});
  }
  return out;
}

PreferenceRelation build_relation(std::span<const Judgment> judgments,
                                  const AnnotatorId& annotator,
                                  const Criterion& criterion,
                                  ConflictPolicy policy,
                                  const std::optional<std::set<ItemId>>& roster) {
  PreferenceRelation relation(roster.value_or(std::set<ItemId>{}));
  std::map<ItemPair, Timestamp> latest;

  for (const Judgment& j : judgments) {
    if (j.annotator != annotator || j.criterion != criterion) continue;
    if (j.left == j.right) {
      throw Error(ErrorCode::SelfPair,
                  "judgment compares item with itself: " + j.left.str());
    }
    if (roster && (!roster->contains(j.left) || !roster->contains(j.right))) {
      throw Error(ErrorCode::InvalidArgument,
                  "judgment references item outside the roster: " +
                      to_string(ItemPair(j.left, j.right)));
    }
    if (policy == ConflictPolicy::Error) {
      relation.insert(j.left, j.right, j.relation);
      continue;
    }
    if (!j.timestamp) {
      throw Error(ErrorCode::InvalidArgument,
                  "keep-latest conflict policy requires timestamps on every "
                  "judgment");
    }
    ItemPair key(j.left, j.right);
    auto it = latest.find(key);
    // Equal timestamps resolve to the later row.
    if (it == latest.end() || it->second <= *j.timestamp) {
      latest.insert_or_assign(key, *j.timestamp);
      relation.assign(j.left, j.right, j.relation);
    }
  }
  return relation;
}

void assert_mode(const PreferenceRelation& relation, Mode mode) {
  if (mode == Mode::Weak) return;
  for (const auto& [key, rel] : relation.pairs()) {
    if (rel == Relation::Tie) {
      throw Error(ErrorCode::TieInStrictMode,
                  "tie on pair " + to_string(key) + " in strict mode");
    }
  }
}

}  // namespace prefia
