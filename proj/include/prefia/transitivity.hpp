#ifndef PREFIA_TRANSITIVITY_HPP
#define PREFIA_TRANSITIVITY_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "prefia/core.hpp"
#include "prefia/rational.hpp"

namespace prefia {

// Relations of the three pairs of a triple (x, y, z), each read from the
// first item of the pair: [0] = (x,y), [1] = (x,z), [2] = (y,z).
using TripleRelations = std::array<Relation, 3>;

using Triple = std::array<ItemId, 3>;

// A fully judged item triple. Items are in ascending (canonical) order.
struct TripletConfig {
  Triple items;
  TripleRelations rels;

  friend bool operator==(const TripletConfig&, const TripletConfig&) = default;
};

// True iff the reflexive weak relation induced by `rels` (a tie relates both
// ways, a strict answer one way) is transitive. Throws TieInStrictMode when a
// tie appears in strict mode.
bool is_transitive(const TripleRelations& rels, Mode mode);
bool is_transitive(const TripletConfig& config, Mode mode);

struct ConfigEntry {
  TripleRelations rels;
  bool transitive;
};

// Every assignment of relations to the three pairs of an abstract triple:
// 27 in weak mode, 8 in strict mode. Ordered lexicographically over
// (Left, Right, Tie) with rels[0] varying slowest.
std::vector<ConfigEntry> enumerate_configs(Mode mode);

// The eight directional "x ≲ y" patterns over a triple, each pair expanded
// into a strict preference or a tie.
struct PatternExpansion {
  std::size_t patterns = 0;
  std::size_t sequences = 0;    // patterns * 2^3
  std::size_t distinct = 0;     // distinct configurations among sequences
  std::size_t repetitions = 0;  // sequences - distinct
  std::vector<TripleRelations> distinct_configs;
};

PatternExpansion expand_directional_patterns();

// The eight patterns with every "≲" read as strict preference. Listed with
// pairs ordered (i1,i2), (i2,i3), (i1,i3) and i1 ≲ i2 before i2 ≲ i1, so
// entries 3 and 6 (1-based) are the two cycles.
std::array<TripleRelations, 8> strict_directional_patterns();

// Probability that a uniformly random assignment over the configurations of
// `mode` is transitive, counted from enumerate_configs.
Rational chance_expected_agreement(Mode mode);

// Item triples whose three pairs are all judged, in lexicographic order. When
// `blocks` is given only those triples are considered (in the given order);
// blocks missing a pair are skipped.
std::vector<TripletConfig> complete_triples(
    const PreferenceRelation& relation,
    const std::optional<std::vector<Triple>>& blocks = std::nullopt);

struct IAReport {
  std::optional<AnnotatorId> annotator;
  std::optional<Criterion> criterion;
  Mode mode = Mode::Weak;
  std::size_t triples_total = 0;
  std::size_t triples_transitive = 0;
  Rational p_a;
  Rational p_e;
  Rational kappa;
  // Set in strict mode: chance agreement there is 3/4, which leaves little
  // room for kappa to discriminate.
  bool strict_mode_warning = false;

  friend bool operator==(const IAReport&, const IAReport&) = default;
};

// Transitivity-based intra-annotator kappa:
//   p_a = transitive triples / triples, K = (p_a - p_e) / (1 - p_e).
// Throws NoCompleteTriples or TieInStrictMode.
IAReport ia_kappa(const PreferenceRelation& relation, Mode mode,
                  const std::optional<std::vector<Triple>>& blocks =
                      std::nullopt);

// Sorts a triple and checks its items are distinct.
Triple canonical_triple(Triple t);

}  // namespace prefia

#endif  // PREFIA_TRANSITIVITY_HPP
