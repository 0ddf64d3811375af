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

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "maxchoice/config.hpp"
#include "maxchoice/max_degree.hpp"
#include "maxchoice/stats.hpp"
#include "maxchoice/tree.hpp"

namespace maxchoice {

// Shortest round-trip decimal form; locale-independent, so CSV output is
// byte-stable across runs and machines.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Geometric checkpoint schedule: base, base*ratio, ... (rounded, strictly
// increasing), with the horizon always appended.
inline std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t base,
                                                      double ratio,
                                                      std::uint64_t horizon) {
  std::vector<std::uint64_t> checkpoints;
  double x = static_cast<double>(base);
  std::uint64_t last = 1;
  while (true) {
    auto n = static_cast<std::uint64_t>(std::llround(x));
    if (n <= last) n = last + 1;
    if (n >= horizon) break;
    checkpoints.push_back(n);
    last = n;
    x *= ratio;
  }
  checkpoints.push_back(horizon);
  return checkpoints;
}

inline std::vector<std::uint64_t> checkpoint_schedule(const RunConfig& config) {
  return checkpoint_schedule(config.checkpoint_base, config.checkpoint_ratio,
                             config.horizon);
}

// The c used by the Q/U scaling trackers; 0 in the config selects the
// critical constant (2+beta)^2/m_2.
inline double effective_scaling_c(const RunConfig& config) {
  if (config.trackers.scaling_c > 0.0) return config.trackers.scaling_c;
  const double threshold = 2.0 + config.params.beta;
  return threshold * threshold / config.params.d.binomial_moment(2);
}

struct TrajectoryRow {
  std::uint64_t n = 0;
  std::uint32_t max_degree = 0;
  std::uint64_t leader_count = 0;
  std::uint32_t leader = 0;  // most recent strict leader
  double m_over_n = 0.0;
  double m_logn_over_n = 0.0;
  std::vector<std::uint64_t> degree_counts;  // N_1 .. N_k_max
  double q_value = 0.0;
  double u_value = 0.0;
  double lemma22_min = 0.0;
};

// Checkpointed observables of one run plus its leader-change summary.
// A "leader change" is the strict maximal-degree vertex changing identity;
// spells with tied leaders neither count nor reset the holder.
struct Trajectory {
  std::uint32_t replica_index = 0;
  std::vector<TrajectoryRow> rows;
  std::uint64_t leader_changes = 0;
  std::uint64_t last_change_step = 0;  // 0 when the first holder never lost
  std::uint64_t late_changes = 0;      // changes with step in (horizon/10, horizon]
  std::array<std::uint64_t, 20> decade_changes{};  // binned by floor(log10(step))
};

namespace harness_detail {

inline std::size_t decade_of(std::uint64_t n) {
  std::size_t d = 0;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

struct LeaderTracker {
  bool has_leader = false;
  std::uint32_t current = 0;
  std::uint64_t changes = 0;
  std::uint64_t last_change = 0;
  std::uint64_t late_changes = 0;
  std::array<std::uint64_t, 20> decades{};

  void observe(const Tree& tree, std::uint64_t horizon) {
    if (tree.leader_count() != 1) return;
    const std::uint32_t top = tree.leaders()[0];
    if (!has_leader) {
      has_leader = true;
      current = top;
      return;
    }
    if (top == current) return;
    current = top;
    ++changes;
    last_change = tree.n();
    if (tree.n() > horizon / 10) ++late_changes;
    ++decades[decade_of(tree.n())];
  }
};

}  // namespace harness_detail

// One seeded run to the horizon. Deterministic given (master_seed,
// replica_index); the generator stream is independent per replica.
inline Trajectory run_single(const RunConfig& config, std::uint32_t replica_index = 0) {
  config.validate();
  Rng rng = Rng::for_replica(config.master_seed, replica_index);
  Tree tree(config.params, config.horizon);
  const std::vector<std::uint64_t> checkpoints = checkpoint_schedule(config);
  const double scaling_c =
      config.trackers.scaling ? effective_scaling_c(config) : 0.0;
  const double growth_exponent = 1.0 / (4.0 * (2.0 + config.params.beta));

  Trajectory trajectory;
  trajectory.replica_index = replica_index;
  trajectory.rows.reserve(checkpoints.size());
  harness_detail::LeaderTracker leader;
  leader.observe(tree, config.horizon);

  double lemma22_min = std::numeric_limits<double>::infinity();
  std::size_t next_checkpoint = 0;
  while (tree.n() < config.horizon) {
    tree.step(rng);
    leader.observe(tree, config.horizon);
    if (next_checkpoint >= checkpoints.size() ||
        tree.n() != checkpoints[next_checkpoint])
      continue;

    ++next_checkpoint;
    TrajectoryRow row;
    row.n = tree.n();
    row.max_degree = tree.max_degree();
    row.leader_count = tree.leader_count();
    row.leader = leader.has_leader ? leader.current : tree.leaders()[0];
    const auto natural = static_cast<double>(tree.n());
    row.m_over_n = static_cast<double>(tree.max_degree()) / natural;
    row.m_logn_over_n =
        static_cast<double>(tree.max_degree()) * std::log(natural) / natural;
    row.degree_counts.resize(config.k_max);
    for (std::uint32_t k = 1; k <= config.k_max; ++k)
      row.degree_counts[k - 1] = tree.degree_count(k);
    if (config.trackers.scaling) {
      const ScalingTrackers s = scaling_values(tree, scaling_c);
      row.q_value = s.q_value;
      row.u_value = s.u_value;
    }
    if (config.trackers.lemma22) {
      lemma22_min = std::min(lemma22_min,
                             static_cast<double>(tree.max_degree()) /
                                 std::pow(natural, growth_exponent));
      row.lemma22_min = lemma22_min;
    }
    if (config.validate_checkpoints) tree.validate();
    trajectory.rows.push_back(std::move(row));
  }

  trajectory.leader_changes = leader.changes;
  trajectory.last_change_step = leader.last_change;
  trajectory.late_changes = leader.late_changes;
  trajectory.decade_changes = leader.decades;
  return trajectory;
}

// Runs fn(0) .. fn(count-1) on up to `threads` workers (0 = hardware count).
// Work items only write their own slot, so results do not depend on the
// schedule.
template <typename Fn>
void parallel_for_index(std::uint32_t count, std::uint32_t threads, Fn&& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::uint32_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::uint32_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint32_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct AggregateRow {
  std::uint64_t n = 0;
  std::string observable;
  double mean = 0.0;
  double variance = 0.0;
  std::uint32_t replicas = 0;
};

struct EnsembleResult {
  std::vector<Trajectory> trajectories;  // ordered by replica index
  std::vector<AggregateRow> aggregate;
};

inline std::vector<std::string> observable_names(const RunConfig& config) {
  std::vector<std::string> names = {"M", "L", "M_over_n", "M_logn_over_n"};
  for (std::uint32_t k = 1; k <= config.k_max; ++k)
    names.push_back("N_" + std::to_string(k));
  if (config.trackers.scaling) {
    names.emplace_back("Q_c");
    names.emplace_back("U_c");
  }
  if (config.trackers.lemma22) names.emplace_back("lemma22_min");
  return names;
}

namespace harness_detail {

inline std::vector<double> observable_values(const TrajectoryRow& row,
                                             const RunConfig& config) {
  std::vector<double> values = {static_cast<double>(row.max_degree),
                                static_cast<double>(row.leader_count),
                                row.m_over_n, row.m_logn_over_n};
  for (const std::uint64_t count : row.degree_counts)
    values.push_back(static_cast<double>(count));
  if (config.trackers.scaling) {
    values.push_back(row.q_value);
    values.push_back(row.u_value);
  }
  if (config.trackers.lemma22) values.push_back(row.lemma22_min);
  return values;
}

}  // namespace harness_detail

// Per-checkpoint mean/variance of every tracked observable, accumulated in
// replica order.
inline std::vector<AggregateRow> aggregate_trajectories(
    std::span<const Trajectory> trajectories, const RunConfig& config) {
  std::vector<AggregateRow> rows;
  if (trajectories.empty()) return rows;
  const std::vector<std::string> names = observable_names(config);
  const std::size_t checkpoints = trajectories.front().rows.size();
  for (const Trajectory& t : trajectories)
    if (t.rows.size() != checkpoints)
      throw std::logic_error("aggregate_trajectories: checkpoint count mismatch");
  for (std::size_t c = 0; c < checkpoints; ++c) {
    std::vector<OnlineMoments> acc(names.size());
    for (const Trajectory& t : trajectories) {
      const std::vector<double> values =
          harness_detail::observable_values(t.rows[c], config);
      for (std::size_t i = 0; i < names.size(); ++i) acc[i].add(values[i]);
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      AggregateRow row;
      row.n = trajectories.front().rows[c].n;
      row.observable = names[i];
      row.mean = acc[i].mean();
      row.variance = acc[i].variance();
      row.replicas = static_cast<std::uint32_t>(trajectories.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// Runs `replicas` independent seeded copies, each its own generator stream,
// and aggregates. Output is identical for any thread count.
inline EnsembleResult run_ensemble(const RunConfig& config, std::uint32_t threads = 0) {
  config.validate();
  EnsembleResult result;
  result.trajectories.assign(config.replicas, Trajectory{});
  parallel_for_index(config.replicas, threads, [&](std::uint32_t r) {
    result.trajectories[r] = run_single(config, r);
  });
  result.aggregate = aggregate_trajectories(result.trajectories, config);
  return result;
}

// Log-log slope of M(n) over checkpoints with n_lo <= n <= n_hi.
inline double estimate_exponent(const Trajectory& trajectory, std::uint64_t n_lo,
                                std::uint64_t n_hi) {
  std::vector<double> log_n;
  std::vector<double> log_m;
  for (const TrajectoryRow& row : trajectory.rows) {
    if (row.n < n_lo || row.n > n_hi) continue;
    log_n.push_back(std::log(static_cast<double>(row.n)));
    log_m.push_back(std::log(static_cast<double>(row.max_degree)));
  }
  if (log_n.size() < 5)
    throw std::invalid_argument(
        "estimate_exponent: need at least 5 checkpoints in the window");
  return least_squares_slope(log_n, log_m);
}

inline void write_trajectory_csv(const Trajectory& trajectory,
                                 const RunConfig& config, std::ostream& out) {
  out << "n,M,L,leader,M_over_n,M_logn_over_n";
  for (std::uint32_t k = 1; k <= config.k_max; ++k) out << ",N_" << k;
  if (config.trackers.scaling) out << ",Q_c,U_c";
  if (config.trackers.lemma22) out << ",lemma22_min";
  out << '\n';
  for (const TrajectoryRow& row : trajectory.rows) {
    out << row.n << ',' << row.max_degree << ',' << row.leader_count << ','
        << row.leader << ',' << format_double(row.m_over_n) << ','
        << format_double(row.m_logn_over_n);
    for (const std::uint64_t count : row.degree_counts) out << ',' << count;
    if (config.trackers.scaling)
      out << ',' << format_double(row.q_value) << ','
          << format_double(row.u_value);
    if (config.trackers.lemma22) out << ',' << format_double(row.lemma22_min);
    out << '\n';
  }
}

inline void write_aggregate_csv(std::span<const AggregateRow> rows,
                                std::ostream& out) {
  out << "n,observable,mean,variance,replicas\n";
  for (const AggregateRow& row : rows)
    out << row.n << ',' << row.observable << ',' << format_double(row.mean) << ','
        << format_double(row.variance) << ',' << row.replicas << '\n';
}

}  // namespace maxchoice
