#include "doctest.h"

#include <cmath>
#include <numeric>

#include "dicke/errors.hpp"
#include "dicke/evaluator.hpp"

using dicke::InitialState;
using dicke::LadderModel;

TEST_CASE("evaluate_population examples") {
  const LadderModel four(4);
  CHECK(dicke::evaluate_population(dicke::decompose(four, 4, 4), four, 0.5, 128) ==
        doctest::Approx(0.1353352832366127).epsilon(1e-15));
  const LadderModel two(2);
  CHECK(dicke::evaluate_population(dicke::decompose(two, 2, 1), two, 1.0, 128) ==
        doctest::Approx(2 * std::exp(-2.0)).epsilon(1e-15));
  for (int m = 1; m <= 4; ++m)
    CHECK(dicke::evaluate_population(dicke::decompose(four, 4, m), four, 0.0, 128) ==
          (m == 4 ? 1.0 : 0.0));
  // gamma rescales time
  const LadderModel slow(4, 0.5);
  CHECK(dicke::evaluate_population(dicke::decompose(slow, 4, 4), slow, 1.0, 128) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(dicke::evaluate_population(dicke::decompose(four, 4, 4), four, -1.0, 128),
                  dicke::DomainError);
  CHECK_THROWS_AS(dicke::evaluate_population(dicke::decompose(four, 4, 4), four, 1.0, 20),
                  dicke::DomainError);
}

TEST_CASE("population snapshots") {
  const LadderModel two(2);
  const auto s = dicke::populations(two, InitialState::pure(2), 1.0);
  const double e2 = std::exp(-2.0);
  CHECK(s.populations[0] == doctest::Approx(1 - 3 * e2).epsilon(1e-14));
  CHECK(s.populations[1] == doctest::Approx(2 * e2).epsilon(1e-14));
  CHECK(s.populations[2] == doctest::Approx(e2).epsilon(1e-14));
  CHECK(s.achieved_precision >= 128);

  const auto mix = dicke::populations(
      two, InitialState::mixed({mpq_class(0), mpq_class(1, 2), mpq_class(1, 2)}), 1.0);
  CHECK(mix.populations[1] == doctest::Approx(1.5 * e2).epsilon(1e-14));

  const auto big = dicke::populations(LadderModel(100), InitialState::pure(100), 0.0);
  for (int m = 0; m < 100; ++m) CHECK(big.populations[m] == 0.0);
  CHECK(big.populations[100] == 1.0);

  const auto n3 = dicke::populations(LadderModel(3), InitialState::pure(3), 0.2);
  CHECK(n3.populations[2] == doctest::Approx(3 * (std::exp(-0.6) - std::exp(-0.8))).epsilon(1e-14));
}

TEST_CASE("evolve traces") {
  const auto one = dicke::evolve(LadderModel(1), InitialState::pure(1), {0.0, 1.0});
  REQUIRE(one.snapshots.size() == 2);
  CHECK(one.snapshots[0].populations[1] == 1.0);
  CHECK(one.snapshots[1].populations[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  const auto four = dicke::evolve(LadderModel(4), InitialState::pure(4), {0.0, 0.3, 1.7});
  for (std::size_t i = 0; i < four.snapshots.size(); ++i) {
    const auto& p = four.snapshots[i].populations;
    CHECK(four.snapshots[i].t == four.times[i]);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(dicke::evolve(LadderModel(4), InitialState::pure(4), {0.5, 0.5}),
                  dicke::DomainError);
  CHECK_THROWS_AS(dicke::evolve(LadderModel(4), InitialState::pure(4), {-0.1, 0.5}),
                  dicke::DomainError);
}

TEST_CASE("snapshot invariants across sizes") {
  for (int n : {5, 30, 150}) {
    const LadderModel model(n);
    const dicke::Propagator prop(model, InitialState::pure(n));
    for (double tau : {1e-4, 1e-2, std::log(n) / n, 1.0, 8.0}) {
      const auto s = prop.snapshot(tau);
      CHECK(s.normalization_residual <= 1e-12);
      for (double p : s.populations) {
        CHECK(p >= -1e-12);
        CHECK(p <= 1 + 1e-12);
      }
      CHECK(s.populations[n] == doctest::Approx(std::exp(-n * tau)).epsilon(1e-13));
    }
  }
}

TEST_CASE("mixed starts are weighted pure evolutions") {
  const int n = 6;
  const LadderModel model(n);
  const std::vector<mpq_class> w{mpq_class(1, 10), mpq_class(0),    mpq_class(1, 5), mpq_class(0),
                                 mpq_class(3, 10), mpq_class(1, 4), mpq_class(3, 20)};
  const double t = 0.37;
  const auto mixed = dicke::populations(model, InitialState::mixed(w), t);
  std::vector<double> combo(n + 1, 0.0);
  combo[0] += w[0].get_d();
  for (int k = 1; k <= n; ++k) {
    if (sgn(w[k]) == 0) continue;
    const auto pure = dicke::populations(model, InitialState::pure(k), t);
    for (int m = 0; m <= n; ++m) combo[m] += w[k].get_d() * pure.populations[m];
  }
  for (int m = 0; m <= n; ++m) CHECK(std::fabs(mixed.populations[m] - combo[m]) <= 1e-12);
}

TEST_CASE("initial state validation") {
  CHECK_THROWS_AS(InitialState::pure(0), dicke::DomainError);
  CHECK_THROWS_AS(InitialState::mixed(std::vector<mpq_class>{mpq_class(1, 2), mpq_class(1, 3)}),
                  dicke::DomainError);
  CHECK_THROWS_AS(InitialState::mixed(std::vector<mpq_class>{mpq_class(3, 2), mpq_class(-1, 2)}),
                  dicke::DomainError);
  CHECK_THROWS_AS(InitialState::mixed(std::vector<double>{0.5, 0.4}), dicke::DomainError);
  const auto real = InitialState::mixed(std::vector<double>{0.25, 0.75});
  CHECK_FALSE(real.is_pure());
  CHECK(real.top() == 1);
  CHECK_THROWS_AS(dicke::Propagator(LadderModel(2), InitialState::pure(3)), dicke::DomainError);
}

TEST_CASE("intensity examples") {
  for (int n : {1, 4, 9}) {
    const LadderModel model(n, 2.0);
    CHECK(dicke::intensity(model, dicke::populations(model, InitialState::pure(n), 0.0)) ==
          doctest::Approx(2.0 * n));
  }
  const LadderModel two(2);
  const auto s = dicke::populations(two, InitialState::pure(2), 0.25);
  CHECK(dicke::intensity(two, s) == doctest::Approx(2 * 1.5 * std::exp(-0.5)).epsilon(1e-14));
  const dicke::Propagator prop(two, InitialState::pure(2));
  CHECK(prop.intensity_at(0.25).first == doctest::Approx(dicke::intensity(two, s)).epsilon(1e-14));

  // N=3: I(tau) = (36 tau - 21) e^{-3 tau} + 24 e^{-4 tau}
  const LadderModel three(3);
  const dicke::Propagator p3(three, InitialState::pure(3));
  for (double tau : {0.0, 0.1, 0.5, 2.0})
    CHECK(p3.intensity_at(tau).first ==
          doctest::Approx((36 * tau - 21) * std::exp(-3 * tau) + 24 * std::exp(-4 * tau)).epsilon(1e-13));
  CHECK(p3.intensity_at(1e-4).first > p3.intensity_at(0.0).first);
}

TEST_CASE("peak emission") {
  const auto two = dicke::peak_emission(LadderModel(2), InitialState::pure(2));
  CHECK(two.t_peak == 0.0);
  CHECK(two.i_peak == doctest::Approx(2.0));

  const auto three = dicke::peak_emission(LadderModel(3), InitialState::pure(3));
  // the stationary point solves (99 - 108 tau) = 96 e^{-tau}, tau = 0.156707...
  CHECK(three.t_peak == doctest::Approx(0.1567073748).epsilon(1e-5));
  CHECK(99 - 108 * three.t_peak == doctest::Approx(96 * std::exp(-three.t_peak)).epsilon(1e-4));

  const auto scaled = dicke::peak_emission(LadderModel(3, 2.0), InitialState::pure(3));
  CHECK(scaled.t_peak == doctest::Approx(three.t_peak / 2).epsilon(1e-5));
  CHECK(scaled.i_peak == doctest::Approx(2 * three.i_peak).epsilon(1e-10));

  const auto hundred = dicke::peak_emission(LadderModel(100), InitialState::pure(100));
  CHECK(std::fabs(hundred.t_peak - std::log(100.0) / 100) <= 0.25 * std::log(100.0) / 100);
}

TEST_CASE("distribution mode") {
  const LadderModel model(9);
  CHECK(dicke::distribution_mode(dicke::populations(model, InitialState::pure(7), 0.0)) == 7);
  CHECK(dicke::distribution_mode(dicke::populations(LadderModel(2), InitialState::pure(2), 20.0)) == 0);

  dicke::PopulationSnapshot tie;
  tie.populations = {0.2, 0.4, 0.4};
  CHECK(dicke::distribution_mode(tie) == 2);
  auto s = dicke::populations(model, InitialState::pure(9), 0.1);
  const int mode = dicke::distribution_mode(s);
  for (double scale : {1e-6, 3.0, 1e5}) {
    auto scaled = s;
    for (auto& p : scaled.populations) p *= scale;
    CHECK(dicke::distribution_mode(scaled) == mode);
  }
}

TEST_CASE("precision override and ceiling") {
  const LadderModel model(60);
  dicke::EvaluatorOptions opts;
  opts.precision_bits = 64;
  const dicke::Propagator prop(model, InitialState::pure(60), opts);
  const auto s = prop.snapshot(0.01);
  CHECK(s.achieved_precision > 64);  // 64 bits cannot absorb the cancellation
  CHECK(s.normalization_residual <= 1e-12);
  CHECK(dicke::precision_ceiling(model) == 64 * dicke::default_precision(model));
  CHECK(dicke::default_precision(LadderModel(1000)) == 2000);
}
