#include "prefia/transitivity.hpp"

#include <algorithm>
#include <set>

namespace prefia {

namespace {

constexpr std::array<std::pair<int, int>, 3> kPairSlots{{{0, 1}, {0, 2}, {1, 2}}};

void check_mode(const TripleRelations& rels, Mode mode) {
  if (mode == Mode::Strict &&
      std::find(rels.begin(), rels.end(), Relation::Tie) != rels.end()) {
    throw Error(ErrorCode::TieInStrictMode, "tie in a strict-mode triple");
  }
}

std::vector<Relation> relations_for(Mode mode) {
  if (mode == Mode::Strict) return {Relation::Left, Relation::Right};
  return {Relation::Left, Relation::Right, Relation::Tie};
}

}  // namespace

bool is_transitive(const TripleRelations& rels, Mode mode) {
  check_mode(rels, mode);

  // weak[a][b] <=> a ≿ b
  bool weak[3][3] = {{true, false, false}, {false, true, false},
                     {false, false, true}};
  for (std::size_t k = 0; k < 3; ++k) {
    auto [a, b] = kPairSlots[k];
    weak[a][b] = rels[k] != Relation::Right;
    weak[b][a] = rels[k] != Relation::Left;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        if (weak[a][b] && weak[b][c] && !weak[a][c]) return false;
  return true;
}

bool is_transitive(const TripletConfig& config, Mode mode) {
  return is_transitive(config.rels, mode);
}

std::vector<ConfigEntry> enumerate_configs(Mode mode) {
  const auto values = relations_for(mode);
  std::vector<ConfigEntry> out;
  for (Relation r0 : values)
    for (Relation r1 : values)
      for (Relation r2 : values) {
        TripleRelations rels{r0, r1, r2};
        out.push_back({rels, is_transitive(rels, mode)});
      }
  return out;
}

std::array<TripleRelations, 8> strict_directional_patterns() {
  // Directions in listing order: pair (i1,i2), then (i2,i3), then (i1,i3).
  // `true` means the first-named item of the pair is preferred.
  static constexpr std::array<std::array<bool, 3>, 8> kDirections{{
      {true, true, true},
      {true, false, true},
      {true, true, false},
      {true, false, false},
      {false, true, true},
      {false, false, true},
      {false, true, false},
      {false, false, false},
  }};
  std::array<TripleRelations, 8> out{};
  for (std::size_t p = 0; p < kDirections.size(); ++p) {
    auto dir = [&](bool fwd) { return fwd ? Relation::Left : Relation::Right; };
    const auto& d = kDirections[p];
    // Canonical slots: (x,y) <- (i1,i2), (x,z) <- (i1,i3), (y,z) <- (i2,i3).
    out[p] = {dir(d[0]), dir(d[2]), dir(d[1])};
  }
  return out;
}

PatternExpansion expand_directional_patterns() {
  PatternExpansion result;
  std::set<TripleRelations> seen;
  for (const TripleRelations& strict : strict_directional_patterns()) {
    ++result.patterns;
    for (unsigned mask = 0; mask < 8; ++mask) {
      TripleRelations seq = strict;
      for (std::size_t k = 0; k < 3; ++k) {
        if (mask & (1u << k)) seq[k] = Relation::Tie;
      }
      ++result.sequences;
      seen.insert(seq);
    }
  }
  result.distinct = seen.size();
  result.repetitions = result.sequences - result.distinct;
  result.distinct_configs.assign(seen.begin(), seen.end());
  return result;
}

Rational chance_expected_agreement(Mode mode) {
  const auto configs = enumerate_configs(mode);
  const auto transitive = std::count_if(
      configs.begin(), configs.end(),
      [](const ConfigEntry& e) { return e.transitive; });
  return Rational(static_cast<std::int64_t>(transitive),
                  static_cast<std::int64_t>(configs.size()));
}

Triple canonical_triple(Triple t) {
  std::sort(t.begin(), t.end());
  if (t[0] == t[1] || t[1] == t[2]) {
    throw Error(ErrorCode::InvalidArgument,
                "triple items must be distinct: " + t[0].str() + "," +
                    t[1].str() + "," + t[2].str());
  }
  return t;
}

namespace {

std::optional<TripletConfig> config_for(const PreferenceRelation& relation,
                                        const Triple& t) {
  TripletConfig config{t, {}};
  for (std::size_t k = 0; k < 3; ++k) {
    auto [a, b] = kPairSlots[k];
    auto r = relation.get(t[a], t[b]);
    if (!r) return std::nullopt;
    config.rels[k] = *r;
  }
  return config;
}

}  // namespace

std::vector<TripletConfig> complete_triples(
    const PreferenceRelation& relation,
    const std::optional<std::vector<Triple>>& blocks) {
  std::vector<TripletConfig> out;

  if (blocks) {
    std::set<Triple> seen;
    for (const Triple& block : *blocks) {
      Triple t = canonical_triple(block);
      if (!seen.insert(t).second) {
        throw Error(ErrorCode::InvalidArgument,
                    "duplicate triplet block: " + t[0].str() + "," +
                        t[1].str() + "," + t[2].str());
      }
      if (auto config = config_for(relation, t)) out.push_back(*config);
    }
    return out;
  }

  // Neighbours above each item in canonical order; pair keys are already
  // (smaller, larger), so walking pairs() in order yields sorted lists.
  std::map<ItemId, std::vector<ItemId>> above;
  for (const auto& [key, rel] : relation.pairs()) {
    above[key.first()].push_back(key.second());
  }
  static const std::vector<ItemId> kNone;
  auto above_of = [&](const ItemId& x) -> const std::vector<ItemId>& {
    auto it = above.find(x);
    return it == above.end() ? kNone : it->second;
  };

  std::vector<ItemId> common;
  for (const auto& [x, ys] : above) {
    for (const ItemId& y : ys) {
      const auto& zs = above_of(y);
      common.clear();
      std::set_intersection(ys.begin(), ys.end(), zs.begin(), zs.end(),
                            std::back_inserter(common));
      for (const ItemId& z : common) {
        out.push_back(*config_for(relation, Triple{x, y, z}));
      }
    }
  }
  return out;
}

IAReport ia_kappa(const PreferenceRelation& relation, Mode mode,
                  const std::optional<std::vector<Triple>>& blocks) {
  assert_mode(relation, mode);
  const auto triples = complete_triples(relation, blocks);
  if (triples.empty()) {
    throw Error(ErrorCode::NoCompleteTriples,
                "no item triple has all three pairs judged");
  }

  IAReport report;
  report.mode = mode;
  report.triples_total = triples.size();
  report.triples_transitive = static_cast<std::size_t>(std::count_if(
      triples.begin(), triples.end(),
      [mode](const TripletConfig& c) { return is_transitive(c, mode); }));
  report.p_a = Rational(static_cast<std::int64_t>(report.triples_transitive),
                        static_cast<std::int64_t>(report.triples_total));
  report.p_e = chance_expected_agreement(mode);
  report.kappa = (report.p_a - report.p_e) / (Rational(1) - report.p_e);
  report.strict_mode_warning = mode == Mode::Strict;
  return report;
}

}  // namespace prefia
