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

TEST_CASE("one-step verification passes on the path with two choices") {
  const Tree tree = testutil::path3(constant_d(2, 0.0));
  const OnestepReport report = verify_onestep(tree, 1000000, 11);
  REQUIRE(report.pass);
  // P(winner degree = 2) = 3/4 with a 5-sigma band of about 0.0022
  REQUIRE(report.max_degree_deviation < 0.0022);
  REQUIRE(report.p_value > 1e-3);
}

TEST_CASE("one-step verification on the single-choice weight law") {
  Tree tree(table_d({{1, 1.0}}, 0.5));
  Rng grow(3);
  for (int i = 0; i < 30; ++i) tree.step(grow);
  const OnestepReport report = verify_onestep(tree, 400000, 23);
  REQUIRE(report.pass);
}

TEST_CASE("one-step verification against the enumeration oracle on star-4") {
  const Tree tree = testutil::star4(table_d({{3, 1.0}}, 0.5));
  const std::vector<double> oracle = enumerate_onestep(tree, 3);
  constexpr std::uint64_t kTrials = 1000000;
  Rng rng(37);
  std::vector<std::uint64_t> hits(4, 0);
  for (std::uint64_t i = 0; i < kTrials; ++i)
    ++hits[tree.sample_winner(rng).chosen_vertex];
  for (std::uint32_t v = 0; v < 4; ++v) {
    const double freq = static_cast<double>(hits[v]) / kTrials;
    REQUIRE(std::fabs(freq - oracle[v]) < binomial_5sigma(oracle[v], kTrials));
  }
  // and the analytic route agrees with the oracle, so verify_onestep passes
  const OnestepReport report = verify_onestep(tree, kTrials, 39);
  REQUIRE(report.pass);
}

TEST_CASE("one-step verification rejects tiny trial counts") {
  const Tree tree = testutil::path3(constant_d(2, 0.0));
  REQUIRE_THROWS_AS(verify_onestep(tree, 10, 1), std::invalid_argument);
}

TEST_CASE("clt verification in the scalar classical case") {
  // criterion-6 shape at reduced size: variance of sqrt(n+1)(N_1/n - 2/3)
  const CltVerifyReport report =
      verify_clt(constant_d(1, 0.0), 1, 20000, 600, 505, 0, 0.15);
  REQUIRE(report.rho_star[0] == Catch::Approx(2.0 / 3.0));
  REQUIRE_THAT(report.limit_theory(0, 0), WithinAbs(1.0 / 9.0, 1e-12));
  REQUIRE(report.pass);
  REQUIRE(report.limit_empirical(0, 0) > 0.0);
}

TEST_CASE("clt verification tracks two coordinates") {
  const CltVerifyReport report =
      verify_clt(constant_d(1, 0.0), 2, 20000, 600, 606, 0, 0.2);
  REQUIRE(report.mean_pass);
  REQUIRE_THAT(report.empirical_mean[0], WithinAbs(2.0 / 3.0, 0.003));
  REQUIRE_THAT(report.empirical_mean[1], WithinAbs(1.0 / 6.0, 0.003));
  // empirical covariance diagonal positive, matrix symmetric by construction
  REQUIRE(report.limit_empirical(0, 0) > 0.0);
  REQUIRE(report.limit_empirical(1, 1) > 0.0);
  REQUIRE(report.limit_empirical(0, 1) == report.limit_empirical(1, 0));
}

TEST_CASE("clt verification guards its preconditions") {
  REQUIRE_THROWS_AS(verify_clt(constant_d(1, 0.0), 1, 10, 600, 1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(verify_clt(constant_d(1, 0.0), 1, 20000, 2, 1),
                    std::invalid_argument);
}

TEST_CASE("hub report aggregates leader changes") {
  RunConfig config(constant_d(3, 0.0));
  config.horizon = 20000;
  config.checkpoint_base = 100;
  config.replicas = 10;
  config.master_seed = 2112;
  const EnsembleResult result = run_ensemble(config, 0);
  const HubReport report = hub_report(result.trajectories, config.horizon);
  REQUIRE(report.replicas == 10);
  REQUIRE(report.changes_per_replica.size() == 10);
  // supercritical growth locks the hub early; most replicas settle within
  // the first tenth of the run
  REQUIRE(report.zero_late_fraction >= 0.8);
  // changes concentrate in the earliest decades
  std::uint64_t early = 0, late = 0;
  for (std::size_t d = 0; d < 3; ++d) early += report.aggregate_decade_changes[d];
  for (std::size_t d = 3; d < report.aggregate_decade_changes.size(); ++d)
    late += report.aggregate_decade_changes[d];
  REQUIRE(early >= late);
}
