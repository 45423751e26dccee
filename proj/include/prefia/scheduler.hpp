#ifndef PREFIA_SCHEDULER_HPP
#define PREFIA_SCHEDULER_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "prefia/core.hpp"

namespace prefia {

// Draws uniformly among undetermined pairs; fully reproducible from the seed.
struct RandomStrategy {
  std::uint64_t seed = 0;
  friend bool operator==(const RandomStrategy&, const RandomStrategy&) = default;
};

// Inserts items one at a time (in session order) by binary search against
// the order built so far.
struct InsertionStrategy {
  friend bool operator==(const InsertionStrategy&,
                         const InsertionStrategy&) = default;
};

using Strategy = std::variant<RandomStrategy, InsertionStrategy>;

enum class SessionStatus { Active, Done };

// A pair together with its relation read from pair.first()'s side.
struct PairRelation {
  ItemPair pair;
  Relation relation;
  friend bool operator==(const PairRelation&, const PairRelation&) = default;
};

struct SessionStats {
  std::size_t n_items = 0;
  std::size_t pairs_total = 0;
  std::size_t pairs_asked = 0;
  std::size_t pairs_inferred = 0;
  double savings_ratio = 0.0;  // pairs_inferred / pairs_total
};

// Adaptive annotation session. Answers are closed under transitivity after
// every record(), so next_pair() only ever returns pairs whose relation
// cannot be deduced from earlier answers.
//
// Ties merge indifference classes; strict answers add dominance between
// classes. The full item-by-item closure is kept as a dense n*n table, which
// makes each update O(n^2).
//
// Not thread-safe: callers serialize next_pair/record per session.
class Session {
 public:
  // Throws DuplicateItems or TooFewItems.
  Session(std::vector<ItemId> items, Mode mode, Strategy strategy);

  const std::vector<ItemId>& items() const noexcept { return items_; }
  Mode mode() const noexcept { return mode_; }
  const Strategy& strategy() const noexcept { return strategy_; }
  SessionStatus status() const noexcept {
    return undetermined_ == 0 ? SessionStatus::Done : SessionStatus::Active;
  }

  // A pair not derivable from the answers so far, or nullopt when done.
  // Repeated calls without an intervening record() return the same pair.
  std::optional<ItemPair> next_pair();

  // Records `left rel right` and returns the pairs it newly determines by
  // closure (excluding the recorded pair itself), in session item order.
  // Throws UnknownPair, PairAlreadyDetermined or TieInStrictMode.
  std::vector<PairRelation> record(const ItemId& left, const ItemId& right,
                                   Relation rel);

  // Relation between a and b read from a's side, if determined.
  std::optional<Relation> relation_of(const ItemId& a, const ItemId& b) const;

  const std::vector<PairRelation>& asked() const noexcept { return asked_; }
  const std::vector<PairRelation>& inferred() const noexcept {
    return inferred_;
  }

  // Indifference classes, each listed in session item order, ordered by
  // their first member.
  std::vector<std::vector<ItemId>> classes() const;

  // Strict dominance between classes (indices into classes()), transitively
  // closed: (i, j) means every member of class i is preferred to class j.
  std::vector<std::pair<std::size_t, std::size_t>> strict_dag() const;

  // Throws SessionNotDone while pairs remain undetermined.
  PreferenceRelation final_relation() const;

  SessionStats stats() const;

  // Asked and inferred pairs in the order they were determined, flagged by
  // source.
  std::vector<Judgment> transcript(const AnnotatorId& annotator,
                                   const Criterion& criterion) const;

 private:
  // cells_[i * n + j] describes item i relative to item j.
  enum class Cell : std::uint8_t { Unknown, Better, Worse, Tie };

  Cell& cell(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  Cell cell(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  bool set(std::size_t i, std::size_t j, Cell c);
  std::size_t index_of(const ItemId& item) const;
  std::optional<std::pair<std::size_t, std::size_t>> pick_random();
  std::optional<std::pair<std::size_t, std::size_t>> pick_insertion() const;
  void check_invariants() const;
  static Relation to_relation(Cell c);

  std::vector<ItemId> items_;
  Mode mode_;
  Strategy strategy_;
  std::size_t n_;
  std::map<ItemId, std::size_t> index_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> class_of_;
  std::size_t undetermined_;
  std::mt19937_64 rng_;
  std::optional<std::pair<std::size_t, std::size_t>> pending_;
  std::vector<PairRelation> asked_;
  std::vector<PairRelation> inferred_;
  std::vector<std::pair<PairRelation, JudgmentSource>> log_;
};

// Ground truth for a simulated annotator: higher score is preferred, equal
// scores are tied.
using GroundTruth = std::vector<std::pair<ItemId, std::int64_t>>;

struct SimulationResult {
  Session session;
  bool matches_ground_truth = false;
};

// Runs a session to completion, answering every asked pair from `truth`,
// then compares the final relation with the ground truth on every pair.
// Throws TieInStrictMode when `truth` has equal scores in strict mode.
SimulationResult simulate_session(const GroundTruth& truth, Mode mode,
                                  Strategy strategy);

inline Session create_session(std::vector<ItemId> items, Mode mode,
                              Strategy strategy) {
  return Session(std::move(items), mode, std::move(strategy));
}

}  // namespace prefia

#endif  // PREFIA_SCHEDULER_HPP
