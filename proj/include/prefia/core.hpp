#ifndef PREFIA_CORE_HPP
#define PREFIA_CORE_HPP

#include <chrono>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prefia/error.hpp"

namespace prefia {

// Non-empty opaque string token, distinct per Tag so item ids, annotator ids
// and criteria cannot be mixed up.
template <class Tag>
class Token {
 public:
  explicit Token(std::string value) : value_(std::move(value)) {
    if (value_.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(Tag::kind) + " must be a non-empty string");
    }
  }

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;

 private:
  std::string value_;
};

struct ItemTag {
  static constexpr const char* kind = "item id";
};
struct AnnotatorTag {
  static constexpr const char* kind = "annotator id";
};
struct CriterionTag {
  static constexpr const char* kind = "criterion";
};

using ItemId = Token<ItemTag>;
using AnnotatorId = Token<AnnotatorTag>;
using Criterion = Token<CriterionTag>;

// Outcome of one pairwise comparison, read from the left item's side.
enum class Relation { Left, Right, Tie };

enum class Mode { Strict, Weak };

enum class ConflictPolicy { Error, KeepLatest };

// Marks rows of a session transcript.
enum class JudgmentSource { Asked, Inferred };

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

constexpr Relation flip(Relation r) noexcept {
  switch (r) {
    case Relation::Left: return Relation::Right;
    case Relation::Right: return Relation::Left;
    case Relation::Tie: return Relation::Tie;
  }
  return r;
}

const char* to_string(Relation r);
const char* to_string(Mode m);
const char* to_string(JudgmentSource s);

struct Judgment {
  AnnotatorId annotator;
  Criterion criterion;
  ItemId left;
  ItemId right;
  Relation relation;
  std::optional<Timestamp> timestamp{};
  std::optional<JudgmentSource> source{};

  friend bool operator==(const Judgment&, const Judgment&) = default;
};

// Unordered pair of distinct items stored in canonical (first < second) order.
class ItemPair {
 public:
  // Throws SelfPair when a == b.
  ItemPair(const ItemId& a, const ItemId& b);

  const ItemId& first() const noexcept { return first_; }
  const ItemId& second() const noexcept { return second_; }

  bool contains(const ItemId& x) const { return x == first_ || x == second_; }

  friend bool operator==(const ItemPair&, const ItemPair&) = default;
  friend auto operator<=>(const ItemPair&, const ItemPair&) = default;

 private:
  ItemId first_;
  ItemId second_;
};

std::string to_string(const ItemPair& p);

// Binary preference relation over a finite item set. Each judged unordered
// pair maps to one Relation, read from pair.first()'s side.
class PreferenceRelation {
 public:
  PreferenceRelation() = default;
  explicit PreferenceRelation(std::set<ItemId> items);

  void add_item(const ItemId& item) { items_.insert(item); }

  // Records `left rel right`. An identical entry is a no-op returning false;
  // a different entry for the same pair throws ConflictingJudgment.
  bool insert(const ItemId& left, const ItemId& right, Relation rel);

  // Records `left rel right`, replacing any previous entry for the pair.
  void assign(const ItemId& left, const ItemId& right, Relation rel);

  // Relation between a and b read from a's side, if judged.
  std::optional<Relation> get(const ItemId& a, const ItemId& b) const;

  // a ≿ b: a is preferred to or tied with b. False when the pair is unjudged.
  bool weakly_prefers(const ItemId& a, const ItemId& b) const;

  const std::set<ItemId>& items() const noexcept { return items_; }
  const std::map<ItemPair, Relation>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  // One judgment per pair, oriented canonically (left = pair.first()).
  std::vector<Judgment> to_judgments(const AnnotatorId& annotator,
                                     const Criterion& criterion) const;

  friend bool operator==(const PreferenceRelation&,
                         const PreferenceRelation&) = default;

 private:
  std::set<ItemId> items_;
  std::map<ItemPair, Relation> pairs_;
};

// Materializes the relation one annotator expressed under one criterion.
// Judgments belonging to other annotators/criteria are ignored. When `roster`
// is given it becomes the item set and every judged item must belong to it.
PreferenceRelation build_relation(
    std::span<const Judgment> judgments, const AnnotatorId& annotator,
    const Criterion& criterion,
    ConflictPolicy policy = ConflictPolicy::Error,
    const std::optional<std::set<ItemId>>& roster = std::nullopt);

// Throws TieInStrictMode when mode is Strict and some pair is a tie.
void assert_mode(const PreferenceRelation& relation, Mode mode);

}  // namespace prefia

#endif  // PREFIA_CORE_HPP
