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

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "maxchoice/degree_clt.hpp"
#include "maxchoice/harness.hpp"
#include "maxchoice/linalg.hpp"
#include "maxchoice/stats.hpp"
#include "maxchoice/tree.hpp"

namespace maxchoice {

// Monte-Carlo checks of the exact laws and the limit theory. PASS thresholds
// are 5-sigma binomial bands where exact probabilities are available; the
// only calibrated-by-pilot thresholds live in the acceptance suite, next to
// the numbers they came from.

struct OnestepReport {
  std::uint64_t trials = 0;
  double max_vertex_deviation = 0.0;   // max_v |empirical - exact|
  double max_vertex_band_ratio = 0.0;  // max_v deviation / 5-sigma band
  double max_degree_deviation = 0.0;   // same over degree bins
  double max_degree_band_ratio = 0.0;
  double chi_square = 0.0;  // over vertices
  double p_value = 0.0;
  bool pass = false;
};

// Draws `trials` independent one-step winners from the frozen tree and
// compares empirical per-vertex and per-degree frequencies against the exact
// conditional laws. PASS iff every deviation sits inside its 5-sigma band.
inline OnestepReport verify_onestep(const Tree& tree, std::uint64_t trials,
                                    std::uint64_t seed) {
  if (trials < 1000)
    throw std::invalid_argument("verify_onestep: trials too small to be useful");
  Rng rng(seed);
  std::vector<std::uint64_t> vertex_hits(tree.vertex_count(), 0);
  std::vector<std::uint64_t> degree_hits(tree.max_degree() + 1, 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const StepOutcome outcome = tree.sample_winner(rng);
    ++vertex_hits[outcome.chosen_vertex];
    ++degree_hits[outcome.chosen_degree];
  }

  OnestepReport report;
  report.trials = trials;
  std::vector<double> vertex_probability(tree.vertex_count());
  for (std::uint32_t v = 0; v < tree.vertex_count(); ++v) {
    const double p = tree.vertex_increase_probability(v);
    vertex_probability[v] = p;
    const double empirical =
        static_cast<double>(vertex_hits[v]) / static_cast<double>(trials);
    const double deviation = std::fabs(empirical - p);
    const double band = binomial_5sigma(p, trials);
    report.max_vertex_deviation = std::max(report.max_vertex_deviation, deviation);
    report.max_vertex_band_ratio =
        std::max(report.max_vertex_band_ratio, deviation / band);
  }
  for (const auto& [degree, p] : tree.choice_degree_distribution()) {
    const double empirical =
        static_cast<double>(degree_hits[degree]) / static_cast<double>(trials);
    const double deviation = std::fabs(empirical - p);
    const double band = binomial_5sigma(p, trials);
    report.max_degree_deviation = std::max(report.max_degree_deviation, deviation);
    report.max_degree_band_ratio =
        std::max(report.max_degree_band_ratio, deviation / band);
  }
  report.chi_square = chi_square_statistic(vertex_hits, vertex_probability, trials);
  report.p_value = chi_square_pvalue(
      report.chi_square, static_cast<double>(tree.vertex_count() - 1));
  report.pass =
      report.max_vertex_band_ratio < 1.0 && report.max_degree_band_ratio < 1.0;
  return report;
}

struct CltVerifyReport {
  std::uint32_t k = 0;
  std::uint64_t n = 0;
  std::uint32_t replicas = 0;
  std::vector<double> rho_star;
  std::vector<double> empirical_mean;     // of N_j/n
  std::vector<double> mean_tolerance;     // 5 sqrt(V_jj/((n+1) R))
  Matrix limit_theory;                    // V
  Matrix limit_empirical;                 // covariance of sqrt(n+1)(W - rho*)
  double max_diag_rel_error = 0.0;
  double max_offdiag_abs_error = 0.0;
  std::vector<double> skewness;           // marginals of the scaled deviations
  std::vector<double> excess_kurtosis;
  double diag_rel_tol = 0.15;
  bool mean_pass = false;
  bool variance_pass = false;
  bool pass = false;
};

// Ensemble check of the degree-count limit law: empirical means of N_j/n
// against rho*_j (5-sigma bands using the theory variance), and the
// empirical covariance of sqrt(n+1)(W_k - rho*) against V entrywise.
// Skew/kurtosis of the marginals are reported as normality diagnostics.
inline CltVerifyReport verify_clt(const ModelParams& params, std::uint32_t k,
                                  std::uint64_t n, std::uint32_t replicas,
                                  std::uint64_t master_seed,
                                  std::uint32_t threads = 0,
                                  double diag_rel_tol = 0.15) {
  if (n < 1000) throw std::invalid_argument("verify_clt: n too small");
  if (replicas < 8) throw std::invalid_argument("verify_clt: replicas too few");

  CltReport theory = compute_clt_report(k, params);

  std::vector<std::vector<double>> fractions(replicas);
  parallel_for_index(replicas, threads, [&](std::uint32_t r) {
    Rng rng = Rng::for_replica(master_seed, r);
    Tree tree(params, n);
    while (tree.n() < n) tree.step(rng);
    std::vector<double> w(k);
    for (std::uint32_t j = 1; j <= k; ++j)
      w[j - 1] = static_cast<double>(tree.degree_count(j)) / static_cast<double>(n);
    fractions[r] = std::move(w);
  });

  CltVerifyReport report;
  report.k = k;
  report.n = n;
  report.replicas = replicas;
  report.rho_star = theory.fixed_point.values;
  report.limit_theory = theory.limit;
  report.diag_rel_tol = diag_rel_tol;

  const double scale = std::sqrt(static_cast<double>(n + 1));
  std::vector<OnlineMoments> marginals(k);
  std::vector<double> mean(k, 0.0);
  for (const auto& w : fractions)
    for (std::uint32_t j = 0; j < k; ++j) mean[j] += w[j];
  for (std::uint32_t j = 0; j < k; ++j) mean[j] /= replicas;

  Matrix cov(k, k);
  for (const auto& w : fractions) {
    std::vector<double> z(k);
    for (std::uint32_t j = 0; j < k; ++j) {
      z[j] = scale * (w[j] - report.rho_star[j]);
      marginals[j].add(z[j]);
    }
    // raw cross sums; centered against the empirical mean below
    for (std::uint32_t a = 0; a < k; ++a)
      for (std::uint32_t b = 0; b < k; ++b) cov(a, b) += z[a] * z[b];
  }
  std::vector<double> z_mean(k);
  for (std::uint32_t j = 0; j < k; ++j)
    z_mean[j] = scale * (mean[j] - report.rho_star[j]);
  for (std::uint32_t a = 0; a < k; ++a)
    for (std::uint32_t b = 0; b < k; ++b)
      cov(a, b) = (cov(a, b) - replicas * z_mean[a] * z_mean[b]) /
                  static_cast<double>(replicas - 1);
  report.limit_empirical = cov;

  report.empirical_mean = mean;
  report.mean_tolerance.resize(k);
  report.mean_pass = true;
  for (std::uint32_t j = 0; j < k; ++j) {
    report.mean_tolerance[j] =
        5.0 * std::sqrt(theory.limit(j, j) /
                        (static_cast<double>(n + 1) * replicas));
    if (std::fabs(mean[j] - report.rho_star[j]) > report.mean_tolerance[j])
      report.mean_pass = false;
  }

  report.variance_pass = true;
  for (std::uint32_t a = 0; a < k; ++a) {
    const double rel =
        std::fabs(cov(a, a) - theory.limit(a, a)) / theory.limit(a, a);
    report.max_diag_rel_error = std::max(report.max_diag_rel_error, rel);
    if (rel > diag_rel_tol) report.variance_pass = false;
    for (std::uint32_t b = a + 1; b < k; ++b)
      report.max_offdiag_abs_error =
          std::max(report.max_offdiag_abs_error,
                   std::fabs(cov(a, b) - theory.limit(a, b)));
  }

  report.skewness.resize(k);
  report.excess_kurtosis.resize(k);
  for (std::uint32_t j = 0; j < k; ++j) {
    report.skewness[j] = marginals[j].skewness();
    report.excess_kurtosis[j] = marginals[j].excess_kurtosis();
  }

  report.pass = report.mean_pass && report.variance_pass;
  return report;
}

struct HubReport {
  std::uint32_t replicas = 0;
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> changes_per_replica;
  std::vector<std::uint64_t> last_change_per_replica;
  std::vector<std::uint64_t> late_changes_per_replica;
  double zero_late_fraction = 0.0;  // replicas with no change in (horizon/10, horizon]
  std::array<std::uint64_t, 20> aggregate_decade_changes{};
};

// Summary of leader persistence across an ensemble: per-replica change
// counts and the fraction of replicas whose leadership never changed in the
// last ninety percent of the run.
inline HubReport hub_report(std::span<const Trajectory> trajectories,
                            std::uint64_t horizon) {
  HubReport report;
  report.replicas = static_cast<std::uint32_t>(trajectories.size());
  report.horizon = horizon;
  std::uint32_t zero_late = 0;
  for (const Trajectory& t : trajectories) {
    report.changes_per_replica.push_back(t.leader_changes);
    report.last_change_per_replica.push_back(t.last_change_step);
    report.late_changes_per_replica.push_back(t.late_changes);
    if (t.late_changes == 0) ++zero_late;
    for (std::size_t d = 0; d < report.aggregate_decade_changes.size(); ++d)
      report.aggregate_decade_changes[d] += t.decade_changes[d];
  }
  if (report.replicas > 0)
    report.zero_late_fraction =
        static_cast<double>(zero_late) / static_cast<double>(report.replicas);
  return report;
}

}  // namespace maxchoice
