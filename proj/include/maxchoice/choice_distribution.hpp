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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "maxchoice/rng.hpp"

namespace maxchoice {

// Law of the per-step choice count d: a positive-integer random variable
// given either as a finite table or as Poisson(lambda) conditioned on d >= 1
// and truncated once the remaining tail mass drops below `truncation_mass`
// (then renormalized). Immutable after construction; safe to share across
// replicas, each sampling with its own generator.
class ChoiceDistribution {
 public:
  enum class Kind { FiniteTable, PoissonConditioned };

  static ChoiceDistribution table(std::vector<std::pair<std::uint32_t, double>> entries) {
    ChoiceDistribution d;
    d.kind_ = Kind::FiniteTable;
    for (const auto& [value, prob] : entries) {
      d.values_.push_back(value);
      d.probs_.push_back(prob);
    }
    d.finish_construction();
    return d;
  }

  // Point mass at `value`.
  static ChoiceDistribution constant(std::uint32_t value) {
    return table({{value, 1.0}});
  }

  static ChoiceDistribution poisson(double lambda, double truncation_mass = 1e-12) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("ChoiceDistribution: lambda must be positive");
    if (!(truncation_mass > 0.0) || truncation_mass >= 1.0)
      throw std::invalid_argument("ChoiceDistribution: truncation_mass in (0,1)");
    ChoiceDistribution d;
    d.kind_ = Kind::PoissonConditioned;
    d.lambda_ = lambda;
    d.truncation_mass_ = truncation_mass;
    const double denom = -std::expm1(-lambda);  // P(d >= 1) for plain Poisson
    double pmf = lambda * std::exp(-lambda) / denom;  // conditioned P(d = 1)
    double cumulative = 0.0;
    double weighted = pmf * 2.0;  // p_i 2^i bounds p_i C(i,j) for every j
    for (std::uint32_t i = 1; i <= kPoissonSupportCap; ++i) {
      d.values_.push_back(i);
      d.probs_.push_back(pmf);
      cumulative += pmf;
      // Cut only once the dropped tail is below truncation_mass both in
      // probability mass and in its possible contribution to any binomial
      // moment; a mass-only cut would shift high m_j visibly.
      const double ratio = 2.0 * lambda / static_cast<double>(i + 2);
      if (1.0 - cumulative < truncation_mass && ratio < 0.5 &&
          weighted * ratio / (1.0 - ratio) < truncation_mass)
        break;
      pmf *= lambda / static_cast<double>(i + 1);
      weighted = pmf * std::exp2(static_cast<double>(i + 1));
    }
    d.finish_construction();
    return d;
  }

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double truncation_mass() const { return truncation_mass_; }
  const std::vector<std::uint32_t>& values() const { return values_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::uint32_t max_value() const { return values_.back(); }
  std::uint32_t min_value() const { return values_.front(); }
  bool is_constant() const { return values_.size() == 1; }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      m += static_cast<double>(values_[i]) * probs_[i];
    return m;
  }

  // Binomial moment m_j = sum_i P(d=i) C(i,j). Binomial coefficients grow
  // through the multiplicative recurrence in double precision, so large
  // support values cannot overflow an integer type.
  double binomial_moment(std::uint32_t j) const {
    if (j < 1) throw std::invalid_argument("binomial_moment: j >= 1 required");
    double m = 0.0;
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      const std::uint32_t i = values_[idx];
      if (i < j) continue;
      double c = 1.0;  // C(i,t) built up over t = 1..j
      for (std::uint32_t t = 1; t <= j; ++t)
        c *= static_cast<double>(i - t + 1) / static_cast<double>(t);
      m += probs_[idx] * c;
    }
    return m;
  }

  // m_1..m_j_max in one pass (row-wise recurrence per support value).
  std::vector<double> binomial_moments(std::uint32_t j_max) const {
    std::vector<double> m(j_max, 0.0);
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      const std::uint32_t i = values_[idx];
      double c = 1.0;
      const std::uint32_t top = std::min(i, j_max);
      for (std::uint32_t j = 1; j <= top; ++j) {
        c *= static_cast<double>(i - j + 1) / static_cast<double>(j);
        m[j - 1] += probs_[idx] * c;
      }
    }
    return m;
  }

  // True iff m_j < C^j for all 1 <= j <= j_max.
  bool growth_check(double c, std::uint32_t j_max) const {
    if (!(c > 0.0) || j_max < 1)
      throw std::invalid_argument("growth_check: C > 0 and j_max >= 1 required");
    const std::vector<double> m = binomial_moments(j_max);
    double cj = 1.0;
    for (std::uint32_t j = 1; j <= j_max; ++j) {
      cj *= c;
      if (!(m[j - 1] < cj)) return false;
    }
    return true;
  }

  // Inverse-CDF draw over the precomputed cumulative table. A point mass
  // consumes no randomness.
  std::uint32_t sample(Rng& rng) const {
    if (values_.size() == 1) return values_[0];
    const double u = rng.next_double();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t idx =
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                              values_.size() - 1);
    return values_[idx];
  }

 private:
  static constexpr std::uint32_t kPoissonSupportCap = 4096;

  void finish_construction() {
    if (values_.empty())
      throw std::invalid_argument("ChoiceDistribution: empty support");
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < 1)
        throw std::invalid_argument("ChoiceDistribution: support values must be >= 1");
      if (i > 0 && values_[i] <= values_[i - 1])
        throw std::invalid_argument(
            "ChoiceDistribution: support must be strictly increasing");
      if (!(probs_[i] > 0.0) || probs_[i] > 1.0)
        throw std::invalid_argument("ChoiceDistribution: probabilities in (0,1]");
      total += probs_[i];
    }
    if (kind_ == Kind::FiniteTable) {
      if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("ChoiceDistribution: probabilities must sum to 1");
    }
    // Renormalize so the stored table sums to 1 exactly up to rounding
    // (absorbs the truncated Poisson tail).
    for (double& p : probs_) p /= total;
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
  }

  Kind kind_ = Kind::FiniteTable;
  double lambda_ = 0.0;
  double truncation_mass_ = 0.0;
  std::vector<std::uint32_t> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace maxchoice
