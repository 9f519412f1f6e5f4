#include "doctest.h"

#include <set>

#include "dicke/errors.hpp"
#include "dicke/ladder.hpp"

using dicke::LadderModel;

TEST_CASE("ladder factor values") {
  const LadderModel m(4);
  CHECK(m.ladder_factor(4) == 4);
  CHECK(m.ladder_factor(2) == 6);
  CHECK(m.ladder_factor(0) == 0);
  CHECK_THROWS_AS(m.ladder_factor(5), dicke::DomainError);
  CHECK_THROWS_AS(m.ladder_factor(-1), dicke::DomainError);
}

TEST_CASE("partner index") {
  CHECK(LadderModel(4).partner(1) == 4);
  CHECK(LadderModel(5).partner(3) == 3);
  CHECK(LadderModel(4).partner(3) == 2);
  CHECK_THROWS_AS(LadderModel(4).partner(0), dicke::DomainError);
  CHECK_THROWS_AS(LadderModel(4).partner(5), dicke::DomainError);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(LadderModel(0), dicke::DomainError);
  CHECK_THROWS_AS(LadderModel(3, 0.0), dicke::DomainError);
  CHECK_THROWS_AS(LadderModel(3, -1.0), dicke::DomainError);
  CHECK(LadderModel(3, 2.5).gamma() == 2.5);
}

TEST_CASE("pole spectrum examples") {
  SUBCASE("N=4 full window") {
    const auto ps = dicke::pole_spectrum(LadderModel(4), 1, 4);
    REQUIRE(ps.entries.size() == 2);
    const auto* four = ps.find(4);
    const auto* six = ps.find(6);
    REQUIRE(four);
    REQUIRE(six);
    CHECK(four->multiplicity == 2);
    CHECK(four->indices == std::vector<int>{1, 4});
    CHECK(six->multiplicity == 2);
    CHECK(six->indices == std::vector<int>{2, 3});
  }
  SUBCASE("N=3 central pole is simple") {
    const auto ps = dicke::pole_spectrum(LadderModel(3), 1, 3);
    REQUIRE(ps.entries.size() == 2);
    CHECK(ps.find(3)->multiplicity == 2);
    CHECK(ps.find(3)->indices == std::vector<int>{1, 3});
    CHECK(ps.find(4)->multiplicity == 1);
    CHECK(ps.find(4)->indices == std::vector<int>{2});
  }
  SUBCASE("partners outside the window") {
    const auto ps = dicke::pole_spectrum(LadderModel(4), 1, 2);
    REQUIRE(ps.entries.size() == 2);
    CHECK(ps.find(4)->multiplicity == 1);
    CHECK(ps.find(6)->multiplicity == 1);
  }
  CHECK_THROWS_AS(dicke::pole_spectrum(LadderModel(4), 3, 2), dicke::DomainError);
  CHECK_THROWS_AS(dicke::pole_spectrum(LadderModel(4), 0, 2), dicke::DomainError);
  CHECK_THROWS_AS(dicke::pole_spectrum(LadderModel(4), 1, 5), dicke::DomainError);
}

TEST_CASE("ladder symmetry, equator maximum and multiplicity bounds") {
  for (int n = 1; n <= 40; ++n) {
    const LadderModel model(n);
    std::int64_t best = 0;
    for (int m = 1; m <= n; ++m) {
      CHECK(model.ladder_factor(m) == model.ladder_factor(n + 1 - m));
      CHECK(model.ladder_factor(m) > 0);
      best = std::max(best, model.ladder_factor(m));
    }
    CHECK(model.ladder_factor(model.equator()) == best);

    for (int lo = 1; lo <= n; ++lo)
      for (int hi = lo; hi <= n; ++hi) {
        const auto ps = dicke::pole_spectrum(model, lo, hi);
        std::set<std::int64_t> values;
        std::set<int> covered;
        for (const auto& e : ps.entries) {
          CHECK(e.multiplicity <= 2);
          CHECK(e.multiplicity == static_cast<int>(e.indices.size()));
          CHECK(values.insert(e.value).second);
          for (int k : e.indices) {
            CHECK(model.ladder_factor(k) == e.value);
            covered.insert(k);
          }
          if (2 * hi <= n) CHECK(e.multiplicity == 1);
        }
        CHECK(static_cast<int>(covered.size()) == hi - lo + 1);
      }
  }
}
