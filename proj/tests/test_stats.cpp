#include <doctest.h>

#include <cmath>

#include "fragpart/error.hpp"
#include "fragpart/stats.hpp"

using namespace fragpart;

TEST_SUITE("stats") {
  TEST_CASE("accumulate a single partition") {
    SummaryStatistics acc(6);
    acc.accumulate(Partition::from_parts({3, 2, 1}));
    const auto mean = acc.mean_species();
    CHECK(mean[1] == 1.0);
    CHECK(mean[2] == 1.0);
    CHECK(mean[3] == 1.0);
    CHECK(mean[4] == 0.0);
    CHECK(acc.m_distribution() == Distribution{{3, 1.0}});
    CHECK(acc.mean_multiplicity() == 3.0);
    CHECK(acc.sample_count() == 1);
    CHECK_THROWS_AS(acc.accumulate(Partition::from_parts({3, 3, 1})), PreconditionError);
  }

  TEST_CASE("at-least selector counts the whole class") {
    SummaryStatistics acc(26, {Selector::at_least(10)});
    acc.accumulate(Partition::from_parts({12, 11, 1, 1, 1}));
    CHECK(acc.species_distribution(0) == Distribution{{0, 0.0}, {2, 1.0}});
  }

  TEST_CASE("selector labels round trip") {
    for (const auto& s : {Selector::exact(1), Selector::exact(4), Selector::at_least(10)})
      CHECK(Selector::parse(s.label()) == s);
    CHECK(Selector::parse(">=3") == Selector::at_least(3));
    CHECK_THROWS_AS(Selector::parse("A=x"), InvalidInput);
    CHECK_THROWS_AS(Selector::parse("A>=0"), InvalidInput);
  }

  TEST_CASE("weighted accumulation uses relative weights") {
    SummaryStatistics acc(2);
    // (2) weight 1 and (1,1) weight 1/2: <M> = 4/3.
    acc.accumulate(Partition::from_parts({2}), 700.0);
    acc.accumulate(Partition::from_parts({1, 1}), 700.0 - std::log(2.0));
    CHECK(acc.mean_multiplicity() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(acc.log_total_weight() == doctest::Approx(700.0 + std::log(1.5)).epsilon(1e-14));
  }

  TEST_CASE("merge matches sequential accumulation") {
    const std::vector<std::pair<Partition, double>> items = {
        {Partition::from_parts({4, 1}), 0.0},   {Partition::from_parts({2, 2, 1}), -1.2},
        {Partition::from_parts({5}), 3.1},      {Partition::from_parts({1, 1, 1, 1, 1}), -4.0},
        {Partition::from_parts({3, 1, 1}), 0.5}};
    SummaryStatistics all(5), a(5), b(5), c(5);
    for (std::size_t i = 0; i < items.size(); ++i) {
      all.accumulate(items[i].first, items[i].second);
      (i < 2 ? a : i < 4 ? b : c).accumulate(items[i].first, items[i].second);
    }
    SummaryStatistics left = a, right = b;
    left.merge(b);
    left.merge(c);
    right.merge(c);
    SummaryStatistics assoc = a;
    assoc.merge(right);
    for (const auto* s : {&left, &assoc}) {
      CHECK(s->sample_count() == all.sample_count());
      CHECK(s->mean_multiplicity() == doctest::Approx(all.mean_multiplicity()).epsilon(1e-14));
      CHECK(s->log_total_weight() == doctest::Approx(all.log_total_weight()).epsilon(1e-14));
      for (std::size_t k = 0; k < all.selectors().size(); ++k) {
        const auto want = all.species_distribution(k);
        const auto got = s->species_distribution(k);
        for (const auto& [n, p] : want) CHECK(got.at(n) == doctest::Approx(p).epsilon(1e-14));
      }
    }
    SummaryStatistics other(6);
    CHECK_THROWS_AS(all.merge(other), PreconditionError);
  }

  TEST_CASE("total variation examples") {
    const Distribution d{{1, 0.2}, {2, 0.3}, {5, 0.5}};
    CHECK(total_variation(d, d) == 0.0);
    CHECK(total_variation({{0, 1.0}}, {{1, 1.0}}) == 1.0);
    CHECK(total_variation({{0, 0.5}, {1, 0.5}}, {{0, 1.0}}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(total_variation({{0, 0.5}}, {{0, 1.0}}), PreconditionError);
  }

  TEST_CASE("chi-square") {
    const Distribution expected{{1, 0.25}, {2, 0.25}, {3, 0.5}};
    const auto exact = chi_square_uniformity({{1, 250}, {2, 250}, {3, 500}}, expected, 1000);
    CHECK(exact.statistic == 0.0);
    CHECK(exact.degrees_of_freedom == 2);
    CHECK(exact.p_value == doctest::Approx(1.0));

    // (10 + 10 - 20)^2 style hand value: (260-250)^2/250 + (240-250)^2/250 = 0.8
    const auto off = chi_square_uniformity({{1, 260}, {2, 240}, {3, 500}}, expected, 1000);
    CHECK(off.statistic == doctest::Approx(0.8));
    CHECK(off.p_value == doctest::Approx(std::exp(-0.4)));  // dof 2 survival is exp(-x/2)

    // Bins with expected count below five are pooled with their neighbours.
    const Distribution sparse{{1, 0.001}, {2, 0.002}, {3, 0.497}, {4, 0.5}};
    const auto pooled = chi_square_uniformity({{1, 1}, {2, 2}, {3, 497}, {4, 500}}, sparse, 1000);
    CHECK(pooled.degrees_of_freedom == 1);
    CHECK(pooled.statistic == doctest::Approx(0.0));

    CHECK_THROWS_AS(chi_square_uniformity({{1, 10}}, {{1, 1.0}}, 10), PreconditionError);
  }

  TEST_CASE("log_add") {
    CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
    CHECK(log_add(-std::numeric_limits<double>::infinity(), 1.5) == 1.5);
  }
}
