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
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "maxchoice/choice_distribution.hpp"
#include "maxchoice/rng.hpp"

namespace maxchoice {

struct ModelParams {
  double beta;
  ChoiceDistribution d;

  ModelParams(double beta_in, ChoiceDistribution d_in)
      : beta(beta_in), d(std::move(d_in)) {
    if (!(beta > -1.0))
      throw std::invalid_argument("ModelParams: beta must be strictly above -1");
  }
};

struct StepOutcome {
  std::uint32_t chosen_vertex = 0;
  std::uint32_t chosen_degree = 0;   // degree before the increment
  std::uint32_t sampled_count = 0;   // realized choice count
  bool tie_occurred = false;         // winner decided among >= 2 tied draws
};

enum class SamplerMode {
  Auto,       // Mixture for beta >= 0, Rejection for beta < 0
  Mixture,    // valid only for beta >= 0
  Rejection,  // valid only for beta <= 0
};

// Growing random tree: each step samples d i.i.d. vertices with probability
// (deg(v)+beta)/((2+beta)n+beta), attaches a new vertex to the sampled vertex
// of largest degree (ties broken uniformly over the tied draws), and tracks
// max degree, the co-leader set and per-degree counts incrementally.
//
// Single-writer: one thread mutates a Tree; independent replicas get
// independent Tree instances and generators.
class Tree {
 public:
  // One-edge starting tree: two vertices of degree 1.
  explicit Tree(ModelParams params, std::uint64_t horizon_hint = 0)
      : params_(std::move(params)) {
    if (horizon_hint > 0) reserve(horizon_hint);
    degrees_ = {1, 1};
    endpoints_ = {0, 1};
    degree_counts_ = {0, 2};
    max_degree_ = 1;
    leaders_ = {0, 1};
    n_ = 1;
  }

  // Frozen state with the given degree sequence. Every observable of the
  // process depends on the degrees only, so no edge list is needed; the
  // endpoint array just repeats each vertex id degree-many times.
  static Tree from_degrees(ModelParams params, const std::vector<std::uint32_t>& degrees) {
    if (degrees.size() < 2)
      throw std::invalid_argument("Tree::from_degrees: need at least 2 vertices");
    std::uint64_t total = 0;
    for (std::uint32_t deg : degrees) {
      if (deg < 1)
        throw std::invalid_argument("Tree::from_degrees: degrees must be >= 1");
      total += deg;
    }
    if (total != 2 * (degrees.size() - 1))
      throw std::invalid_argument(
          "Tree::from_degrees: degree sum must equal 2*(vertices-1)");
    Tree t(std::move(params));
    t.degrees_ = degrees;
    t.n_ = degrees.size() - 1;
    t.endpoints_.clear();
    t.degree_counts_.assign(*std::max_element(degrees.begin(), degrees.end()) + 1, 0);
    t.leaders_.clear();
    t.max_degree_ = 0;
    for (std::uint32_t v = 0; v < degrees.size(); ++v) {
      const std::uint32_t deg = degrees[v];
      for (std::uint32_t i = 0; i < deg; ++i) t.endpoints_.push_back(v);
      ++t.degree_counts_[deg];
      if (deg > t.max_degree_) {
        t.max_degree_ = deg;
        t.leaders_.assign(1, v);
      } else if (deg == t.max_degree_) {
        t.leaders_.push_back(v);
      }
    }
    return t;
  }

  const ModelParams& params() const { return params_; }
  std::uint64_t n() const { return n_; }  // edge count
  std::uint64_t vertex_count() const { return degrees_.size(); }
  std::uint32_t degree(std::uint32_t v) const { return degrees_[v]; }
  const std::vector<std::uint32_t>& degrees() const { return degrees_; }
  std::uint32_t max_degree() const { return max_degree_; }
  std::uint64_t leader_count() const { return leaders_.size(); }
  std::span<const std::uint32_t> leaders() const { return leaders_; }

  // N_k; zero beyond the current maximum degree.
  std::uint64_t degree_count(std::uint32_t k) const {
    return k < degree_counts_.size() ? degree_counts_[k] : 0;
  }

  // Total attachment weight (2+beta)n + beta = sum_v (deg(v)+beta).
  double total_weight() const {
    return (2.0 + params_.beta) * static_cast<double>(n_) + params_.beta;
  }

  void reserve(std::uint64_t horizon) {
    if (horizon > kMaxHorizon)
      throw std::runtime_error("Tree: horizon exceeds the 32-bit id budget");
    try {
      degrees_.reserve(horizon + 2);
      endpoints_.reserve(2 * horizon + 2);
    } catch (const std::bad_alloc&) {
      throw std::runtime_error("Tree: horizon exceeds the memory budget");
    }
  }

  // One vertex draw from the attachment law. For beta >= 0 this is a mixture
  // of a uniform endpoint (degree-proportional part) and a uniform vertex
  // (beta part); for beta < 0 a uniform-endpoint proposal is thinned with
  // acceptance (deg+beta)/deg, which stays in (1+beta, 1].
  std::uint32_t sample_vertex(Rng& rng, SamplerMode mode = SamplerMode::Auto) const {
    const double beta = params_.beta;
    if (mode == SamplerMode::Auto)
      mode = beta < 0.0 ? SamplerMode::Rejection : SamplerMode::Mixture;
    if (mode == SamplerMode::Mixture) {
      if (beta < 0.0)
        throw std::invalid_argument("sample_vertex: mixture needs beta >= 0");
      if (beta == 0.0) return endpoints_[rng.next_below(endpoints_.size())];
      const double endpoint_share =
          static_cast<double>(endpoints_.size()) / total_weight();
      if (rng.next_double() < endpoint_share)
        return endpoints_[rng.next_below(endpoints_.size())];
      return static_cast<std::uint32_t>(rng.next_below(degrees_.size()));
    }
    if (beta > 0.0)
      throw std::invalid_argument("sample_vertex: rejection needs beta <= 0");
    for (;;) {
      const std::uint32_t v = endpoints_[rng.next_below(endpoints_.size())];
      const double deg = degrees_[v];
      if (rng.next_double() * deg < deg + beta) return v;
    }
  }

  // Draws the choice count and the candidate vertices and picks the winner
  // without mutating the tree. The tie-break is a reservoir over the draws
  // attaining the running maximum, i.e. uniform over tied draws (a vertex
  // sampled twice at the top degree carries two draws).
  StepOutcome sample_winner(Rng& rng) const {
    const std::uint32_t count = params_.d.sample(rng);
    std::uint32_t best_vertex = 0;
    std::uint32_t best_degree = 0;
    std::uint32_t attained = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t v = sample_vertex(rng);
      const std::uint32_t deg = degrees_[v];
      if (deg > best_degree) {
        best_degree = deg;
        best_vertex = v;
        attained = 1;
      } else if (deg == best_degree) {
        ++attained;
        if (rng.next_below(attained) == 0) best_vertex = v;
      }
    }
    return {best_vertex, best_degree, count, attained > 1};
  }

  // Advances the tree one step. Amortized O(d) per call.
  StepOutcome step(Rng& rng) {
    const StepOutcome outcome = sample_winner(rng);
    apply(outcome);
    return outcome;
  }

  // Exact conditional law of the winner's degree, as (degree, probability)
  // pairs over the degrees currently present. Probabilities sum to 1 up to
  // rounding.
  std::vector<std::pair<std::uint32_t, double>> choice_degree_distribution() const {
    const double beta = params_.beta;
    const double total = total_weight();
    std::vector<std::pair<std::uint32_t, double>> law;
    double cumulative_weight = 0.0;
    double alpha_prev = 0.0;
    for (std::uint32_t k = 1; k <= max_degree_; ++k) {
      const std::uint64_t count = degree_counts_[k];
      if (count == 0) continue;
      cumulative_weight +=
          static_cast<double>(count) * (static_cast<double>(k) + beta);
      const double alpha_k =
          k == max_degree_ ? 1.0 : cumulative_weight / total;
      law.emplace_back(k, weighted_power_diff(alpha_k, alpha_prev));
      alpha_prev = alpha_k;
    }
    return law;
  }

  // Probability that this step raises the maximal degree:
  // sum_i P(d=i) (1 - (1 - (M+beta)L/W)^i).
  double max_increase_probability() const {
    const double z = (static_cast<double>(max_degree_) + params_.beta) *
                     static_cast<double>(leaders_.size()) / total_weight();
    double p = 0.0;
    const auto& values = params_.d.values();
    const auto& probs = params_.d.probabilities();
    for (std::size_t i = 0; i < values.size(); ++i)
      p += probs[i] * (1.0 - std::pow(1.0 - z, static_cast<double>(values[i])));
    return p;
  }

  // Probability that vertex v gains the new edge this step. The winner's
  // degree must equal deg(v), which happens with probability
  // alpha(A) - alpha(A+B) where A/B are the weights of strictly-higher /
  // equal-degree vertices; within that event each unit of weight at the top
  // degree is equally likely.
  double vertex_increase_probability(std::uint32_t v) const {
    const double beta = params_.beta;
    const double total = total_weight();
    const std::uint32_t deg = degrees_[v];
    double above = 0.0;
    for (std::uint32_t k = deg + 1; k <= max_degree_; ++k)
      above += static_cast<double>(degree_counts_[k]) *
               (static_cast<double>(k) + beta);
    const double at = static_cast<double>(degree_counts_[deg]) *
                      (static_cast<double>(deg) + beta);
    const double win_at_degree =
        survival_alpha(above, total) - survival_alpha(above + at, total);
    return (static_cast<double>(deg) + beta) * win_at_degree / at;
  }

  // Full consistency rescan; throws on any mismatch with the incremental
  // bookkeeping. Intended for tests and scheduled debug checks.
  void validate() const {
    if (degrees_.size() != n_ + 1)
      throw std::runtime_error("Tree::validate: vertex count != n+1");
    if (endpoints_.size() != 2 * n_)
      throw std::runtime_error("Tree::validate: endpoint array length != 2n");
    std::uint64_t degree_sum = 0;
    std::uint32_t rescanned_max = 0;
    std::vector<std::uint64_t> histogram(degree_counts_.size(), 0);
    std::vector<std::uint64_t> endpoint_histogram(degrees_.size(), 0);
    for (std::uint32_t v = 0; v < degrees_.size(); ++v) {
      const std::uint32_t deg = degrees_[v];
      degree_sum += deg;
      rescanned_max = std::max(rescanned_max, deg);
      if (deg >= histogram.size())
        throw std::runtime_error("Tree::validate: degree beyond tracked range");
      ++histogram[deg];
    }
    for (std::uint32_t id : endpoints_) ++endpoint_histogram[id];
    for (std::uint32_t v = 0; v < degrees_.size(); ++v)
      if (endpoint_histogram[v] != degrees_[v])
        throw std::runtime_error("Tree::validate: endpoint multiplicity mismatch");
    if (degree_sum != 2 * n_)
      throw std::runtime_error("Tree::validate: degree sum != 2n");
    if (rescanned_max != max_degree_)
      throw std::runtime_error("Tree::validate: stale max degree");
    if (histogram != degree_counts_)
      throw std::runtime_error("Tree::validate: stale degree counts");
    const std::uint64_t leader_rescan = histogram[max_degree_];
    if (leader_rescan != leaders_.size())
      throw std::runtime_error("Tree::validate: stale leader set");
    for (std::uint32_t v : leaders_)
      if (degrees_[v] != max_degree_)
        throw std::runtime_error("Tree::validate: non-maximal leader");
  }

 private:
  static constexpr std::uint64_t kMaxHorizon = 2'000'000'000ULL;

  void apply(const StepOutcome& outcome) {
    const auto new_id = static_cast<std::uint32_t>(degrees_.size());
    const std::uint32_t new_degree = outcome.chosen_degree + 1;
    degrees_[outcome.chosen_vertex] = new_degree;
    degrees_.push_back(1);
    endpoints_.push_back(outcome.chosen_vertex);
    endpoints_.push_back(new_id);
    ++degree_counts_[1];
    --degree_counts_[outcome.chosen_degree];
    if (new_degree >= degree_counts_.size()) degree_counts_.resize(new_degree + 1, 0);
    ++degree_counts_[new_degree];
    if (new_degree > max_degree_) {
      max_degree_ = new_degree;
      leaders_.clear();
      leaders_.push_back(outcome.chosen_vertex);
    } else if (new_degree == max_degree_) {
      leaders_.push_back(outcome.chosen_vertex);
    }
    ++n_;
  }

  // sum_m P(d=m) (a^m - b^m)
  double weighted_power_diff(double a, double b) const {
    const auto& values = params_.d.values();
    const auto& probs = params_.d.probabilities();
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto m = static_cast<double>(values[i]);
      s += probs[i] * (std::pow(a, m) - std::pow(b, m));
    }
    return s;
  }

  // sum_k P(d=k) (1 - x/W)^k: probability that no draw lands in a vertex
  // set of total weight x.
  double survival_alpha(double x, double total) const {
    const auto& values = params_.d.values();
    const auto& probs = params_.d.probabilities();
    const double base = 1.0 - x / total;
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      s += probs[i] * std::pow(base, static_cast<double>(values[i]));
    return s;
  }

  ModelParams params_;
  std::uint64_t n_ = 0;
  std::vector<std::uint32_t> degrees_;
  std::vector<std::uint32_t> endpoints_;
  std::vector<std::uint64_t> degree_counts_;  // index = degree
  std::vector<std::uint32_t> leaders_;
  std::uint32_t max_degree_ = 0;
};

// Exact one-step attachment law by summing over every ordered candidate
// tuple, with the same uniform-over-tied-draws rule as Tree::sample_winner.
// Ground truth for tests; the budget guard keeps the tuple count sane.
inline std::vector<double> enumerate_onestep(const Tree& tree, std::uint32_t d_cap) {
  const std::size_t vertex_count = tree.vertex_count();
  if (vertex_count > 12)
    throw std::runtime_error("enumerate_onestep: more than 12 vertices");
  if (d_cap > 6) throw std::runtime_error("enumerate_onestep: d_cap above 6");
  if (tree.params().d.max_value() > d_cap)
    throw std::runtime_error("enumerate_onestep: choice support exceeds d_cap");

  const double beta = tree.params().beta;
  const double total = tree.total_weight();
  std::vector<double> draw_probability(vertex_count);
  for (std::uint32_t v = 0; v < vertex_count; ++v)
    draw_probability[v] = (static_cast<double>(tree.degree(v)) + beta) / total;

  std::vector<double> law(vertex_count, 0.0);
  const auto& values = tree.params().d.values();
  const auto& probs = tree.params().d.probabilities();
  for (std::size_t di = 0; di < values.size(); ++di) {
    const std::uint32_t m = values[di];
    std::vector<std::uint32_t> tuple(m, 0);
    for (;;) {
      double tuple_probability = probs[di];
      std::uint32_t top_degree = 0;
      std::uint32_t top_draws = 0;
      for (std::uint32_t v : tuple) {
        tuple_probability *= draw_probability[v];
        const std::uint32_t deg = tree.degree(v);
        if (deg > top_degree) {
          top_degree = deg;
          top_draws = 1;
        } else if (deg == top_degree) {
          ++top_draws;
        }
      }
      const double share = tuple_probability / top_draws;
      for (std::uint32_t v : tuple)
        if (tree.degree(v) == top_degree) law[v] += share;
      // odometer over the m draws
      std::uint32_t pos = 0;
      while (pos < m && ++tuple[pos] == vertex_count) tuple[pos++] = 0;
      if (pos == m) break;
    }
  }
  return law;
}

// CSV snapshot of the degree sequence.
inline void write_snapshot_csv(const Tree& tree, std::ostream& out) {
  out << "vertex_id,degree\n";
  for (std::uint32_t v = 0; v < tree.vertex_count(); ++v)
    out << v << ',' << tree.degree(v) << '\n';
}

}  // namespace maxchoice
