#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "prefia/transitivity.hpp"
#include "support.hpp"

using namespace prefia;
using namespace prefia::testing;

namespace {

constexpr Relation L = Relation::Left;
constexpr Relation R = Relation::Right;
constexpr Relation T = Relation::Tie;

PreferenceRelation triple_relation(const std::string& x, const std::string& y,
                                   const std::string& z, TripleRelations rels) {
  PreferenceRelation r;
  r.insert(item(x), item(y), rels[0]);
  r.insert(item(x), item(z), rels[1]);
  r.insert(item(y), item(z), rels[2]);
  return r;
}

}  // namespace

TEST_CASE("is_transitive examples") {
  // x<y, y<z, x<z: a chain
  CHECK(is_transitive(TripleRelations{L, L, L}, Mode::Weak));
  CHECK(is_transitive(TripleRelations{L, L, L}, Mode::Strict));
  // i1<i2, i2<i3, i3<i1: the incompatible cycle
  CHECK_FALSE(is_transitive(TripleRelations{L, R, L}, Mode::Weak));
  CHECK_FALSE(is_transitive(TripleRelations{L, R, L}, Mode::Strict));
  // x~y, y~z, x<z: ties force x~z
  CHECK_FALSE(is_transitive(TripleRelations{T, L, T}, Mode::Weak));
  CHECK(is_transitive(TripleRelations{T, T, T}, Mode::Weak));
}

TEST_CASE("is_transitive rejects ties in strict mode") {
  try {
    is_transitive(TripleRelations{T, L, L}, Mode::Strict);
    FAIL("expected TieInStrictMode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TieInStrictMode);
  }
}

TEST_CASE("is_transitive agrees with the value-assignment oracle") {
  for (Relation a : {L, R, T})
    for (Relation b : {L, R, T})
      for (Relation c : {L, R, T}) {
        const TripleRelations rels{a, b, c};
        CAPTURE(static_cast<int>(a));
        CAPTURE(static_cast<int>(b));
        CAPTURE(static_cast<int>(c));
        CHECK(is_transitive(rels, Mode::Weak) == transitive_by_values(rels));
        if (a != T && b != T && c != T) {
          CHECK(is_transitive(rels, Mode::Strict) == transitive_by_values(rels));
        }
      }
}

TEST_CASE("enumerate_configs cardinalities") {
  const auto weak = enumerate_configs(Mode::Weak);
  const auto strict = enumerate_configs(Mode::Strict);
  auto transitive = [](const std::vector<ConfigEntry>& v) {
    return std::count_if(v.begin(), v.end(), [](const ConfigEntry& e) { return e.transitive; });
  };
  CHECK(weak.size() == 27);
  CHECK(transitive(weak) == 13);
  CHECK(strict.size() == 8);
  CHECK(transitive(strict) == 6);

  // Distinct and deterministic.
  std::set<TripleRelations> distinct;
  for (const auto& e : weak) distinct.insert(e.rels);
  CHECK(distinct.size() == 27);
  CHECK(std::is_sorted(weak.begin(), weak.end(), [](const auto& x, const auto& y) {
    return x.rels < y.rels;
  }));

  // (x<y, y~z, x<z) appears exactly once and is transitive.
  const TripleRelations repeated{L, L, T};
  const auto hits = std::count_if(weak.begin(), weak.end(),
                                  [&](const ConfigEntry& e) { return e.rels == repeated; });
  CHECK(hits == 1);
  CHECK(is_transitive(repeated, Mode::Weak));
}

TEST_CASE("13 transitive configs are the total preorders on three elements") {
  // Independent count: distinct pair tables induced by all value
  // assignments {0,1,2}^3.
  std::set<TripleRelations> preorders;
  auto cmp = [](int p, int q) { return p > q ? L : p < q ? R : T; };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) preorders.insert({cmp(a, b), cmp(a, c), cmp(b, c)});
  CHECK(preorders.size() == 13);

  for (const auto& e : enumerate_configs(Mode::Weak)) {
    CHECK(e.transitive == preorders.contains(e.rels));
  }
}

TEST_CASE("directional pattern expansion") {
  const auto expansion = expand_directional_patterns();
  CHECK(expansion.patterns == 8);
  CHECK(expansion.sequences == 64);
  CHECK(expansion.repetitions == 37);
  CHECK(expansion.distinct == 27);

  std::set<TripleRelations> all;
  for (const auto& e : enumerate_configs(Mode::Weak)) all.insert(e.rels);
  CHECK(std::set<TripleRelations>(expansion.distinct_configs.begin(),
                                  expansion.distinct_configs.end()) == all);

  // Read strictly, only listed patterns 3 and 6 are intransitive.
  const auto strict = strict_directional_patterns();
  for (std::size_t p = 0; p < strict.size(); ++p) {
    CAPTURE(p + 1);
    CHECK(is_transitive(strict[p], Mode::Strict) == (p != 2 && p != 5));
  }
}

TEST_CASE("chance agreement is counted from the enumeration") {
  CHECK(chance_expected_agreement(Mode::Weak) == Rational(13, 27));
  CHECK(chance_expected_agreement(Mode::Strict) == Rational(6, 8));
  for (Mode m : {Mode::Weak, Mode::Strict}) {
    const auto configs = enumerate_configs(m);
    std::int64_t hits = 0;
    for (const auto& e : configs) hits += transitive_by_values(e.rels);
    CHECK(chance_expected_agreement(m) ==
          Rational(hits, static_cast<std::int64_t>(configs.size())));
  }
}

TEST_CASE("complete_triples") {
  SUBCASE("one full triple") {
    auto r = triple_relation("a", "b", "c", {L, L, L});
    auto triples = complete_triples(r);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].items == Triple{item("a"), item("b"), item("c")});
  }
  SUBCASE("missing pair") {
    PreferenceRelation r;
    r.insert(item("a"), item("b"), L);
    r.insert(item("a"), item("c"), L);
    CHECK(complete_triples(r).empty());
  }
  SUBCASE("all pairs over four items") {
    const auto ids = items_named(4);
    auto r = relation_from_scores(ids, {3, 1, 2, 0});
    // Brute force: every 3-subset of 4 items.
    std::size_t expected = 0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j)
        for (std::size_t k = j + 1; k < 4; ++k) ++expected;
    CHECK(complete_triples(r).size() == expected);
    CHECK(expected == 4);
  }
  SUBCASE("relations are read in canonical orientation") {
    PreferenceRelation r;
    r.insert(item("c"), item("a"), L);  // c preferred to a
    r.insert(item("b"), item("a"), R);  // a preferred to b
    r.insert(item("c"), item("b"), T);
    auto triples = complete_triples(r);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].rels == TripleRelations{L, R, T});
  }
}

TEST_CASE("complete_triples restricted to blocks") {
  const auto ids = items_named(5);
  auto r = relation_from_scores(ids, {4, 3, 2, 1, 0});
  std::vector<Triple> blocks{{item("i3"), item("i1"), item("i2")},
                             {item("i5"), item("i4"), item("i3")}};
  auto triples = complete_triples(r, blocks);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0].items == Triple{item("i1"), item("i2"), item("i3")});

  PreferenceRelation sparse;
  sparse.insert(item("i1"), item("i2"), L);
  CHECK(complete_triples(sparse, blocks).empty());

  blocks.push_back(blocks.front());
  CHECK_THROWS_AS(complete_triples(r, blocks), Error);
  CHECK_THROWS_AS(canonical_triple({item("a"), item("a"), item("b")}), Error);
}

TEST_CASE("ia_kappa on the three-annotator triplet example") {
  const Triple b1{item("i1"), item("i2"), item("i3")};
  const Triple b2{item("i4"), item("i5"), item("i6")};
  const Triple b3{item("i7"), item("i8"), item("i9")};
  auto annotate = [&](std::array<TripleRelations, 3> rels) {
    PreferenceRelation r;
    for (std::size_t k = 0; k < 3; ++k) {
      const Triple& t = k == 0 ? b1 : k == 1 ? b2 : b3;
      r.insert(t[0], t[1], rels[k][0]);
      r.insert(t[0], t[2], rels[k][1]);
      r.insert(t[1], t[2], rels[k][2]);
    }
    return r;
  };
  const TripleRelations ok{L, L, L}, cycle{L, R, L}, tie_break{T, L, T};

  const auto a1 = ia_kappa(annotate({ok, ok, ok}), Mode::Weak);
  CHECK(a1.triples_total == 3);
  CHECK(a1.p_a == Rational(1));
  CHECK(a1.kappa == Rational(1));

  // (2/3 - 13/27) / (1 - 13/27) = (5/27) / (14/27)
  const auto a2 = ia_kappa(annotate({ok, cycle, ok}), Mode::Weak);
  CHECK(a2.p_a == Rational(2, 3));
  CHECK(a2.p_e == Rational(13, 27));
  CHECK(a2.kappa == Rational(5, 14));
  CHECK(boost::rational_cast<double>(a2.kappa) == doctest::Approx(0.357).epsilon(0.001));

  // (1/3 - 13/27) / (14/27) = (-4/27) / (14/27)
  const auto a3 = ia_kappa(annotate({tie_break, ok, cycle}), Mode::Weak);
  CHECK(a3.p_a == Rational(1, 3));
  CHECK(a3.kappa == Rational(-2, 7));
  // With P(E) rounded to 0.48 the value prints as -0.28.
  CHECK((1.0 / 3 - 0.48) / (1 - 0.48) == doctest::Approx(-0.2821).epsilon(0.001));
  CHECK_FALSE(a3.strict_mode_warning);
}

TEST_CASE("ia_kappa error paths and strict mode") {
  PreferenceRelation two;
  two.insert(item("a"), item("b"), L);
  try {
    ia_kappa(two, Mode::Weak);
    FAIL("expected NoCompleteTriples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoCompleteTriples);
  }

  auto tied = triple_relation("a", "b", "c", {T, L, L});
  CHECK_THROWS_AS(ia_kappa(tied, Mode::Strict), Error);

  auto strict = triple_relation("a", "b", "c", {L, L, L});
  const auto report = ia_kappa(strict, Mode::Strict);
  CHECK(report.p_e == Rational(3, 4));
  CHECK(report.kappa == Rational(1));
  CHECK(report.strict_mode_warning);
}

TEST_CASE("ia_kappa properties over random relations") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> rel(0, 2);
  std::bernoulli_distribution keep(0.8);

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 5;
    const auto ids = items_named(n);
    PreferenceRelation r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (keep(rng)) r.insert(ids[i], ids[j], static_cast<Relation>(rel(rng)));
    if (complete_triples(r).empty()) continue;

    const auto report = ia_kappa(r, Mode::Weak);
    CHECK(report.p_a >= Rational(0));
    CHECK(report.p_a <= Rational(1));
    CHECK(report.kappa == (report.p_a - report.p_e) / (Rational(1) - report.p_e));
    CHECK((report.kappa == Rational(1)) ==
          (report.triples_transitive == report.triples_total));

    // Relabel items with a random permutation of fresh names.
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    std::shuffle(names.begin(), names.end(), rng);
    std::map<ItemId, ItemId> rename;
    for (std::size_t i = 0; i < n; ++i) rename.emplace(ids[i], ItemId(names[i]));
    PreferenceRelation relabeled;
    for (const auto& [key, rl] : r.pairs()) {
      relabeled.insert(rename.at(key.first()), rename.at(key.second()), rl);
    }
    const auto other = ia_kappa(relabeled, Mode::Weak);
    CHECK(other.triples_total == report.triples_total);
    CHECK(other.triples_transitive == report.triples_transitive);
    CHECK(other.kappa == report.kappa);
  }
}
