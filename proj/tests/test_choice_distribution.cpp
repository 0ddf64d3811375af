// Copyright 2026 The Maxchoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "maxchoice/choice_distribution.hpp"
#include "maxchoice/rng.hpp"
#include "maxchoice/stats.hpp"

using maxchoice::ChoiceDistribution;
using maxchoice::Rng;
using Catch::Matchers::WithinAbs;

TEST_CASE("point mass moments") {
  const ChoiceDistribution d = ChoiceDistribution::constant(3);
  REQUIRE(d.mean() == 3.0);
  REQUIRE(d.binomial_moment(1) == 3.0);  // m_1 = E d
  REQUIRE(d.binomial_moment(2) == 3.0);  // C(3,2)
  REQUIRE(d.binomial_moment(3) == 1.0);
  REQUIRE(d.binomial_moment(4) == 0.0);  // above the support
}

TEST_CASE("two point table") {
  const ChoiceDistribution d = ChoiceDistribution::table({{1, 0.5}, {2, 0.5}});
  REQUIRE_THAT(d.mean(), WithinAbs(1.5, 1e-15));
  REQUIRE_THAT(d.binomial_moment(2), WithinAbs(0.5, 1e-15));
  REQUIRE(d.binomial_moment(3) == 0.0);
}

TEST_CASE("support below j gives zero moment") {
  REQUIRE(ChoiceDistribution::constant(1).binomial_moment(2) == 0.0);
}

TEST_CASE("invalid tables are rejected") {
  REQUIRE_THROWS_AS(ChoiceDistribution::table({{0, 1.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(ChoiceDistribution::table({{2, 0.5}, {1, 0.5}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(ChoiceDistribution::table({{1, 0.5}, {1, 0.5}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(ChoiceDistribution::table({{1, 0.7}, {2, 0.7}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(ChoiceDistribution::table({{1, -0.1}, {2, 1.1}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(ChoiceDistribution::poisson(-1.0), std::invalid_argument);
}

TEST_CASE("conditioned poisson mean") {
  const ChoiceDistribution d = ChoiceDistribution::poisson(2.0);
  const double expected = 2.0 / (1.0 - std::exp(-2.0));
  REQUIRE_THAT(d.mean(), WithinAbs(expected, 1e-12));
  REQUIRE_THAT(d.mean(), WithinAbs(2.3130352854993312, 1e-12));
}

TEST_CASE("conditioned poisson binomial moments match the factorial identity") {
  // E C(d,j) = lambda^j / j! for plain Poisson; conditioning divides by
  // P(d >= 1).
  for (const double lambda : {0.5, 2.0, 5.0, 10.0}) {
    const ChoiceDistribution d = ChoiceDistribution::poisson(lambda);
    const double denom = 1.0 - std::exp(-lambda);
    for (std::uint32_t j = 1; j <= 20; ++j) {
      const double expected =
          std::exp(j * std::log(lambda) - std::lgamma(j + 1.0)) / denom;
      REQUIRE_THAT(d.binomial_moment(j), WithinAbs(expected, 1e-10));
    }
  }
  const ChoiceDistribution d2 = ChoiceDistribution::poisson(2.0);
  REQUIRE_THAT(d2.binomial_moment(3),
               WithinAbs((8.0 / 6.0) / (1.0 - std::exp(-2.0)), 1e-10));
}

TEST_CASE("binomial_moments vector agrees with single evaluations") {
  const ChoiceDistribution d = ChoiceDistribution::poisson(3.0);
  const std::vector<double> m = d.binomial_moments(15);
  for (std::uint32_t j = 1; j <= 15; ++j)
    REQUIRE_THAT(m[j - 1], WithinAbs(d.binomial_moment(j), 1e-13));
}

TEST_CASE("m_1 equals the mean") {
  for (const ChoiceDistribution& d :
       {ChoiceDistribution::constant(4),
        ChoiceDistribution::table({{1, 0.2}, {3, 0.3}, {7, 0.5}}),
        ChoiceDistribution::poisson(1.3)}) {
    REQUIRE_THAT(d.binomial_moment(1), WithinAbs(d.mean(), 1e-12));
  }
}

TEST_CASE("growth check") {
  const ChoiceDistribution d3 = ChoiceDistribution::constant(3);
  REQUIRE(d3.growth_check(4.0, 10));
  REQUIRE_FALSE(d3.growth_check(1.0, 2));  // m_1 = 3 >= 1
  REQUIRE(ChoiceDistribution::poisson(2.0).growth_check(3.0, 20));
}

TEST_CASE("poisson support starts at one") {
  const ChoiceDistribution d = ChoiceDistribution::poisson(2.0);
  REQUIRE(d.min_value() == 1);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) REQUIRE(d.sample(rng) >= 1);
}

TEST_CASE("point mass sampling is deterministic") {
  const ChoiceDistribution d = ChoiceDistribution::constant(2);
  Rng rng(9);
  for (int i = 0; i < 100; ++i) REQUIRE(d.sample(rng) == 2);
}

TEST_CASE("empirical table frequencies within 5 sigma at 1e6 draws") {
  const ChoiceDistribution d = ChoiceDistribution::table({{1, 0.5}, {3, 0.5}});
  Rng rng(2024);
  constexpr std::uint64_t kTrials = 1000000;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < kTrials; ++i) ones += d.sample(rng) == 1;
  const double freq = static_cast<double>(ones) / kTrials;
  REQUIRE(std::fabs(freq - 0.5) < 0.0025);  // 5 sigma
}

TEST_CASE("chi-square goodness of fit at 1e6 draws") {
  const ChoiceDistribution d =
      ChoiceDistribution::table({{1, 0.2}, {2, 0.3}, {4, 0.4}, {9, 0.1}});
  Rng rng(77);
  constexpr std::uint64_t kTrials = 1000000;
  std::vector<std::uint64_t> hits(d.values().size(), 0);
  for (std::uint64_t i = 0; i < kTrials; ++i) {
    const std::uint32_t v = d.sample(rng);
    for (std::size_t idx = 0; idx < d.values().size(); ++idx)
      if (d.values()[idx] == v) ++hits[idx];
  }
  const double stat = maxchoice::chi_square_statistic(hits, d.probabilities(), kTrials);
  const double p = maxchoice::chi_square_pvalue(stat, static_cast<double>(hits.size() - 1));
  REQUIRE(p > 1e-3);
}

TEST_CASE("poisson truncation refinement leaves the mean put") {
  const ChoiceDistribution coarse = ChoiceDistribution::poisson(4.0, 1e-12);
  const ChoiceDistribution fine = ChoiceDistribution::poisson(4.0, 1e-15);
  REQUIRE_THAT(coarse.mean(), WithinAbs(fine.mean(), 1e-11));
  for (std::uint32_t j = 1; j <= 12; ++j)
    REQUIRE_THAT(coarse.binomial_moment(j), WithinAbs(fine.binomial_moment(j), 1e-9));
}
