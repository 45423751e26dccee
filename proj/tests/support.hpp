// Shared generators and independent oracles for the test suites.
#ifndef PREFIA_TESTS_SUPPORT_HPP
#define PREFIA_TESTS_SUPPORT_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "prefia/core.hpp"
#include "prefia/transitivity.hpp"

namespace prefia::testing {

inline ItemId item(const std::string& s) { return ItemId(s); }

inline Judgment judge(const std::string& annotator, const std::string& left,
                      const std::string& right, Relation rel,
                      const std::string& criterion = "gram") {
  return Judgment{AnnotatorId(annotator), Criterion(criterion), ItemId(left),
                  ItemId(right), rel};
}

inline std::vector<ItemId> items_named(std::size_t n, const std::string& prefix = "i") {
  std::vector<ItemId> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(prefix + std::to_string(i + 1));
  return out;
}

// Random scores in [0, levels); equal scores are ties.
inline std::vector<std::int64_t> random_scores(std::size_t n, std::int64_t levels,
                                               std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> draw(0, levels - 1);
  std::vector<std::int64_t> s(n);
  for (auto& v : s) v = draw(rng);
  return s;
}

// Complete relation induced by scores: higher score preferred.
inline PreferenceRelation relation_from_scores(const std::vector<ItemId>& items,
                                               const std::vector<std::int64_t>& scores) {
  PreferenceRelation r(std::set<ItemId>(items.begin(), items.end()));
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const Relation rel = scores[i] > scores[j]   ? Relation::Left
                           : scores[i] < scores[j] ? Relation::Right
                                                   : Relation::Tie;
      r.insert(items[i], items[j], rel);
    }
  return r;
}

// Transitivity oracle: a triple is consistent iff some value assignment
// v : {x,y,z} -> {0,1,2} realizes every strict answer as a strict
// inequality and every tie as an equality.
inline bool transitive_by_values(const TripleRelations& rels) {
  static constexpr std::array<std::array<int, 2>, 3> slots{{{0, 1}, {0, 2}, {1, 2}}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const int v[3] = {a, b, c};
        bool ok = true;
        for (std::size_t k = 0; k < 3 && ok; ++k) {
          const int p = v[slots[k][0]], q = v[slots[k][1]];
          switch (rels[k]) {
            case Relation::Left: ok = p > q; break;
            case Relation::Right: ok = p < q; break;
            case Relation::Tie: ok = p == q; break;
          }
        }
        if (ok) return true;
      }
  return false;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixture(const std::string& name) {
  return std::string(PREFIA_FIXTURES) + "/" + name;
}

}  // namespace prefia::testing

#endif  // PREFIA_TESTS_SUPPORT_HPP
