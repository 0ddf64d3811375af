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
#include <vector>

#include "maxchoice/linalg.hpp"
#include "maxchoice/stats.hpp"

using maxchoice::Matrix;

TEST_CASE("lu_solve on a known system") {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 3;
  const std::vector<double> x = maxchoice::lu_solve(a, {5, 10});
  REQUIRE_THAT(x[0], Catch::Matchers::WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(x[1], Catch::Matchers::WithinAbs(3.0, 1e-14));
}

TEST_CASE("lu_solve rejects singular matrices") {
  Matrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = 4;
  REQUIRE_THROWS_AS(maxchoice::lu_solve(a, {1, 2}), std::runtime_error);
}

TEST_CASE("cholesky detects definiteness") {
  Matrix pd(2, 2);
  pd(0, 0) = 4;
  pd(0, 1) = 2;
  pd(1, 0) = 2;
  pd(1, 1) = 3;
  const auto l = maxchoice::cholesky(pd);
  REQUIRE(l.has_value());
  const Matrix r = (*l) * l->transpose() - pd;
  REQUIRE(r.max_abs() < 1e-14);

  Matrix indefinite(2, 2);
  indefinite(0, 0) = 1;
  indefinite(0, 1) = 2;
  indefinite(1, 0) = 2;
  indefinite(1, 1) = 1;
  REQUIRE_FALSE(maxchoice::cholesky(indefinite).has_value());
}

TEST_CASE("jacobi eigenvalues of a symmetric matrix") {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  const std::vector<double> eig = maxchoice::symmetric_eigenvalues(a);
  REQUIRE_THAT(eig[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(eig[1], Catch::Matchers::WithinAbs(3.0, 1e-12));
}

TEST_CASE("least squares slope recovers an exact line") {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i);
    y.push_back(3.5 * i - 2.0);
  }
  REQUIRE_THAT(maxchoice::least_squares_slope(x, y),
               Catch::Matchers::WithinAbs(3.5, 1e-12));
}

TEST_CASE("gamma_q matches closed forms") {
  // Q(1, x) = exp(-x)
  REQUIRE_THAT(maxchoice::gamma_q(1.0, 2.0),
               Catch::Matchers::WithinAbs(std::exp(-2.0), 1e-13));
  // chi-square upper tails at the 5% critical values
  REQUIRE_THAT(maxchoice::chi_square_pvalue(3.841458820694124, 1),
               Catch::Matchers::WithinAbs(0.05, 1e-6));
  REQUIRE_THAT(maxchoice::chi_square_pvalue(11.070497693516351, 5),
               Catch::Matchers::WithinAbs(0.05, 1e-6));
  REQUIRE(maxchoice::chi_square_pvalue(0.0, 3) == 1.0);
}

TEST_CASE("online moments against direct formulas") {
  const std::vector<double> data = {1.0, 2.0, 2.0, 3.0, 7.0, 11.0, 0.5, 4.0};
  maxchoice::OnlineMoments acc;
  for (double v : data) acc.add(v);

  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= static_cast<double>(data.size());
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : data) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(data.size());
  REQUIRE_THAT(acc.mean(), Catch::Matchers::WithinAbs(mean, 1e-12));
  REQUIRE_THAT(acc.variance(), Catch::Matchers::WithinAbs(m2 / (n - 1), 1e-12));
  REQUIRE_THAT(acc.skewness(),
               Catch::Matchers::WithinAbs(std::sqrt(n) * m3 / std::pow(m2, 1.5), 1e-12));
  REQUIRE_THAT(acc.excess_kurtosis(),
               Catch::Matchers::WithinAbs(n * m4 / (m2 * m2) - 3.0, 1e-12));
}

TEST_CASE("chi square statistic is zero on exact counts") {
  const std::vector<std::uint64_t> observed = {250, 250, 500};
  const std::vector<double> probability = {0.25, 0.25, 0.5};
  REQUIRE(maxchoice::chi_square_statistic(observed, probability, 1000) == 0.0);
}
