#ifndef PREFIA_REPRESENTATION_HPP
#define PREFIA_REPRESENTATION_HPP

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "prefia/core.hpp"
#include "prefia/transitivity.hpp"

namespace prefia {

// Absolute scores derived from a complete, transitive relation:
// scores[x] = scale * #{y != x : x ≿ y}.
struct ScoreTable {
  std::map<ItemId, std::int64_t> scores;
  std::int64_t scale = 1;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;
};

struct CompletenessReport {
  bool complete = true;
  std::vector<ItemPair> missing_pairs;
};

struct TransitivityReport {
  bool transitive = true;
  std::vector<TripletConfig> violations;
};

// Unordered pairs over `items` with no judgment in `relation`. The relation's
// own items must be a subset of `items`.
CompletenessReport check_strongly_complete(const PreferenceRelation& relation,
                                           const std::set<ItemId>& items);

// Checks every fully judged triple of the induced weak relation.
TransitivityReport check_transitive(const PreferenceRelation& relation);

// Counting representation. Throws NotComplete or NotTransitive when the
// relation does not admit one; throws InvariantViolation if the produced
// table fails to represent the relation.
ScoreTable derive_scores(const PreferenceRelation& relation,
                         const std::set<ItemId>& items);

// Multiplies every score by n (n >= 1); the result orders items identically.
ScoreTable scale_scores(const ScoreTable& table, std::int64_t n);

// True iff for every judged pair, x ≿ y <=> score(x) >= score(y), and every
// relation item has a score.
bool represents(const ScoreTable& table, const PreferenceRelation& relation);

}  // namespace prefia

#endif  // PREFIA_REPRESENTATION_HPP
