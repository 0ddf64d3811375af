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

#include "test_util.hpp"

using namespace maxchoice;
using Catch::Matchers::WithinAbs;
using testutil::constant_d;
using testutil::table_d;

TEST_CASE("f on a single choice is linear") {
  const ModelParams p = constant_d(1, 0.0);
  REQUIRE_THAT(f_eval(1.0, p), WithinAbs(0.5, 1e-15));
  for (double x = 0.0; x <= 1.0; x += 0.1)
    REQUIRE_THAT(f_eval(x, p), WithinAbs(x / 2.0, 1e-15));
}

TEST_CASE("f vanishes at zero and is capped by one") {
  for (const auto& p :
       {constant_d(3, 0.0), constant_d(1, 1.0),
        ModelParams(0.5, ChoiceDistribution::poisson(2.0))}) {
    REQUIRE(f_eval(0.0, p) == 0.0);
    REQUIRE(f_eval(1.0, p) < 1.0);
  }
}

TEST_CASE("f for three choices at x=1") {
  const ModelParams p = constant_d(3, 0.0);
  REQUIRE_THAT(f_eval(1.0, p), WithinAbs(0.875, 1e-15));  // 1 - (1/2)^3
  REQUIRE_THAT(f_series(1.0, p), WithinAbs(f_eval(1.0, p), 1e-12));
}

TEST_CASE("f domain is guarded") {
  const ModelParams p = constant_d(2, 0.0);
  REQUIRE_THROWS_AS(f_eval(-0.1, p), std::domain_error);
  REQUIRE_THROWS_AS(f_eval(2.1, p), std::domain_error);
}

TEST_CASE("direct and series evaluations agree on a grid") {
  const std::vector<ModelParams> models = {
      constant_d(1, 0.0),
      constant_d(3, 0.0),
      table_d({{1, 0.5}, {2, 0.5}}, 1.0),
      table_d({{2, 0.25}, {5, 0.75}}, -0.5),
      ModelParams(0.0, ChoiceDistribution::poisson(2.0)),
      ModelParams(0.5, ChoiceDistribution::poisson(8.0)),
  };
  for (const ModelParams& p : models)
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      REQUIRE_THAT(f_series(x, p), WithinAbs(f_eval(x, p), 1e-12));
    }
}

TEST_CASE("f is increasing and concave on [0,1]") {
  const std::vector<ModelParams> models = {
      constant_d(3, 0.0), table_d({{1, 0.3}, {4, 0.7}}, 0.5),
      ModelParams(0.0, ChoiceDistribution::poisson(3.0))};
  for (const ModelParams& p : models) {
    const double h = 0.01;
    double prev = f_eval(0.0, p);
    for (int i = 1; i <= 100; ++i) {
      const double cur = f_eval(i * h, p);
      REQUIRE(cur > prev);
      prev = cur;
    }
    for (int i = 1; i < 100; ++i) {
      const double second = f_eval((i + 1) * h, p) - 2.0 * f_eval(i * h, p) +
                            f_eval((i - 1) * h, p);
      REQUIRE(second <= 1e-10);
    }
  }
}

TEST_CASE("g extends f(x)/x continuously") {
  const ModelParams d3 = constant_d(3, 0.0);
  REQUIRE_THAT(g_eval(0.0, d3), WithinAbs(1.5, 1e-15));  // E d / (2+beta)
  const ModelParams d1 = constant_d(1, 0.0);
  for (double x = 0.1; x <= 1.0; x += 0.1)
    REQUIRE_THAT(g_eval(x, d1), WithinAbs(0.5, 1e-15));
}

TEST_CASE("g decreases from g(0) on (0,1]") {
  // strictly decreasing for the supercritical point mass
  const ModelParams d3 = constant_d(3, 0.0);
  double prev = g_eval(0.0, d3);
  for (int i = 1; i <= 100; ++i) {
    const double cur = g_eval(i / 100.0, d3);
    REQUIRE(cur < prev);
    prev = cur;
  }
  // and bounded by g(0) for a (sub)critical model
  const ModelParams d2 = constant_d(2, 0.0);
  for (int i = 1; i <= 100; ++i) REQUIRE(g_eval(i / 100.0, d2) < g_eval(0.0, d2));
}

TEST_CASE("x* for three choices matches the quadratic root") {
  // 1-(1-x/2)^3 = x reduces to x^2-6x+4 = 0, root 3-sqrt(5)
  const double x = solve_x_star(constant_d(3, 0.0));
  REQUIRE_THAT(x, WithinAbs(3.0 - std::sqrt(5.0), 1e-12));
}

TEST_CASE("x* for four choices matches the cubic oracle") {
  // 1-(1-x/2)^4 = x factors as (y-1)(y^3+y^2+y-1) = 0 with y = 1-x/2;
  // Newton on the cubic gives the independent value.
  double y = 0.5;
  for (int i = 0; i < 60; ++i) {
    const double fval = ((y + 1.0) * y + 1.0) * y - 1.0;
    const double fprime = (3.0 * y + 2.0) * y + 1.0;
    y -= fval / fprime;
  }
  const double expected = 2.0 * (1.0 - y);
  REQUIRE_THAT(expected, WithinAbs(0.9126219746158475, 1e-12));
  REQUIRE_THAT(solve_x_star(constant_d(4, 0.0)), WithinAbs(expected, 1e-12));
}

TEST_CASE("x* requires the supercritical regime") {
  REQUIRE_THROWS_AS(solve_x_star(constant_d(2, 0.0)), std::domain_error);
  REQUIRE_THROWS_AS(solve_x_star(constant_d(1, 0.0)), std::domain_error);
}

TEST_CASE("x* fixed point residual") {
  for (const auto& p : {constant_d(3, 0.0), constant_d(5, 0.5),
                        ModelParams(0.0, ChoiceDistribution::poisson(4.0))}) {
    const double x = solve_x_star(p);
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    REQUIRE(std::fabs(f_eval(x, p) - x) < 1e-13);
  }
}

TEST_CASE("x* is stable under truncation refinement") {
  const double coarse =
      solve_x_star(ModelParams(0.0, ChoiceDistribution::poisson(4.0, 1e-12)));
  const double fine =
      solve_x_star(ModelParams(0.0, ChoiceDistribution::poisson(4.0, 1e-15)));
  REQUIRE_THAT(coarse, WithinAbs(fine, 1e-10));
}

TEST_CASE("regime classification") {
  const RegimeReport sub = classify_regime(constant_d(1, 0.5));
  REQUIRE(sub.regime == Regime::Subcritical);
  REQUIRE_THAT(*sub.exponent, WithinAbs(1.0 / 2.5, 1e-15));
  REQUIRE_FALSE(sub.x_star.has_value());

  const RegimeReport crit = classify_regime(constant_d(2, 0.0));
  REQUIRE(crit.regime == Regime::Critical);
  REQUIRE_THAT(*crit.critical_constant, WithinAbs(4.0, 1e-12));

  const RegimeReport super = classify_regime(constant_d(3, 0.0));
  REQUIRE(super.regime == Regime::Supercritical);
  REQUIRE_THAT(*super.x_star, WithinAbs(3.0 - std::sqrt(5.0), 1e-12));

  const RegimeReport mixed = classify_regime(table_d({{1, 0.5}, {2, 0.5}}, 1.0));
  REQUIRE(mixed.regime == Regime::Subcritical);
  REQUIRE_THAT(*mixed.exponent, WithinAbs(0.5, 1e-15));
}

TEST_CASE("single choice is subcritical for every beta") {
  for (const double beta : {-0.9, -0.5, 0.0, 3.0}) {
    const RegimeReport r = classify_regime(constant_d(1, beta));
    REQUIRE(r.regime == Regime::Subcritical);
    REQUIRE_THAT(*r.exponent, WithinAbs(1.0 / (2.0 + beta), 1e-15));
  }
}

TEST_CASE("scaling trackers") {
  const ScalingTrackers t = scaling_values(1, 1, 1.0);
  REQUIRE_THAT(t.q_value, WithinAbs(std::exp(1.0), 1e-15));
  REQUIRE_THAT(t.u_value, WithinAbs(std::exp(-1.0), 1e-15));
  // Q * U == 1 identically
  for (std::uint64_t n : {std::uint64_t{10}, std::uint64_t{1234}}) {
    const ScalingTrackers s = scaling_values(n, 7, 2.5);
    REQUIRE_THAT(s.q_value * s.u_value, WithinAbs(1.0, 1e-12));
  }
  REQUIRE_THROWS_AS(scaling_values(10, 0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(scaling_values(10, 3, 0.0), std::invalid_argument);
}

TEST_CASE("Q stays order one when M tracks the critical asymptotic") {
  // substitute M(n) = c n / ln n into Q
  const double c = 4.0;
  for (const double n : {1e5, 1e6, 1e7}) {
    const auto m = static_cast<std::uint32_t>(c * n / std::log(n));
    const ScalingTrackers s =
        scaling_values(static_cast<std::uint64_t>(n), m, c);
    REQUIRE(s.q_value > 0.5);
    REQUIRE(s.q_value < 3.0);  // exp(c n/M)/n = exp(ln n + o(ln n))/n
  }
}
