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

// Command-line front end: simulate | theory | clt | verify {onestep,clt,hub}.
// Exit codes: 0 success / all checks passed, 1 statistical failure,
// 2 configuration or usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxchoice/maxchoice.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatFail = 1;
constexpr int kExitConfig = 2;

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

std::string replica_file_name(std::uint32_t replica) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trajectory_r%04u.csv", replica);
  return buf;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::uint32_t threads, bool snapshot) {
  const maxchoice::RunConfig config = maxchoice::load_run_config(config_path);
  const maxchoice::EnsembleResult result = maxchoice::run_ensemble(config, threads);
  const std::filesystem::path dir(out_dir);
  for (const maxchoice::Trajectory& t : result.trajectories) {
    auto out = open_output(dir, replica_file_name(t.replica_index));
    maxchoice::write_trajectory_csv(t, config, out);
  }
  if (config.replicas > 1) {
    auto out = open_output(dir, "aggregate.csv");
    maxchoice::write_aggregate_csv(result.aggregate, out);
  }
  if (snapshot) {
    // Deterministic rerun of replica 0 to the horizon for the degree dump.
    maxchoice::Rng rng = maxchoice::Rng::for_replica(config.master_seed, 0);
    maxchoice::Tree tree(config.params, config.horizon);
    while (tree.n() < config.horizon) tree.step(rng);
    auto out = open_output(dir, "snapshot_r0000.csv");
    maxchoice::write_snapshot_csv(tree, out);
  }
  const maxchoice::Trajectory& first = result.trajectories.front();
  const maxchoice::TrajectoryRow& last = first.rows.back();
  std::cout << "replicas " << config.replicas << ", horizon " << config.horizon
            << "\nreplica 0: M(n)=" << last.max_degree
            << " M/n=" << maxchoice::format_double(last.m_over_n)
            << " leader=" << last.leader << " leader_changes="
            << first.leader_changes << "\nwrote " << out_dir << '\n';
  return kExitOk;
}

void print_field(const char* name, const std::string& value) {
  std::printf("%-18s %s\n", name, value.c_str());
}

int run_theory(const std::string& config_path) {
  const maxchoice::RunConfig config = maxchoice::load_run_config(config_path);
  const maxchoice::RegimeReport report = maxchoice::classify_regime(config.params);
  print_field("regime", maxchoice::regime_name(report.regime));
  print_field("mean_d", maxchoice::format_double(report.mean_d));
  print_field("threshold", maxchoice::format_double(report.threshold));
  if (report.exponent) print_field("exponent", maxchoice::format_double(*report.exponent));
  if (report.x_star) print_field("x_star", maxchoice::format_double(*report.x_star));
  if (report.critical_constant)
    print_field("critical_constant", maxchoice::format_double(*report.critical_constant));
  const auto opt = [](const std::optional<double>& v) {
    return v ? maxchoice::format_double(*v) : std::string();
  };
  std::cout << "\nregime,mean_d,threshold,exponent,x_star,critical_constant\n"
            << maxchoice::regime_name(report.regime) << ','
            << maxchoice::format_double(report.mean_d) << ','
            << maxchoice::format_double(report.threshold) << ','
            << opt(report.exponent) << ',' << opt(report.x_star) << ','
            << opt(report.critical_constant) << '\n';
  return kExitOk;
}

int run_clt(const std::string& config_path, std::uint32_t k_flag,
            const std::string& out_dir) {
  const maxchoice::RunConfig config = maxchoice::load_run_config(config_path);
  const std::uint32_t k = k_flag > 0 ? k_flag : config.k_max;
  const maxchoice::CltReport report = maxchoice::compute_clt_report(k, config.params);

  const std::filesystem::path dir(out_dir);
  {
    auto out = open_output(dir, "rho_star.csv");
    out << "l,x_star_l,residual\n";
    for (std::uint32_t l = 1; l <= k; ++l)
      out << l << ',' << maxchoice::format_double(report.fixed_point.values[l - 1])
          << ',' << maxchoice::format_double(report.fixed_point.residuals[l - 1])
          << '\n';
  }
  {
    auto out = open_output(dir, "matrices.csv");
    out << "matrix,row,col,value\n";
    const auto dump = [&](const char* name, const maxchoice::Matrix& m) {
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
          out << name << ',' << i + 1 << ',' << j + 1 << ','
              << maxchoice::format_double(m(i, j)) << '\n';
    };
    dump("jacobian", report.jacobian);
    dump("noise", report.noise);
    dump("limit", report.limit);
  }

  std::printf("k                  %u\n", k);
  std::printf("gamma_star         %g\n", report.gamma_star);
  std::printf("eigenvalues       ");
  for (double e : report.eigenvalues) std::printf(" %.12g", e);
  std::printf("\nlyapunov_residual  %.3g\n", report.lyapunov_residual);
  std::printf("limit_pos_definite %s\n", report.limit_positive_definite ? "yes" : "no");
  std::printf("wrote %s/rho_star.csv, %s/matrices.csv\n", out_dir.c_str(),
              out_dir.c_str());
  return kExitOk;
}

int run_verify_onestep(const std::string& config_path, std::uint64_t trials) {
  const maxchoice::RunConfig config = maxchoice::load_run_config(config_path);
  struct Case {
    std::string name;
    maxchoice::Tree tree;
  };
  std::vector<Case> cases;
  cases.push_back({"path-3", maxchoice::Tree::from_degrees(config.params, {2, 1, 1})});
  cases.push_back({"star-4", maxchoice::Tree::from_degrees(config.params, {3, 1, 1, 1})});
  {
    maxchoice::Rng rng = maxchoice::Rng::for_replica(config.master_seed, 0);
    maxchoice::Tree grown(config.params);
    while (grown.n() < 50) grown.step(rng);
    cases.push_back({"grown-50", std::move(grown)});
  }
  bool all_pass = true;
  for (const Case& c : cases) {
    const maxchoice::OnestepReport report =
        maxchoice::verify_onestep(c.tree, trials, config.master_seed + 17);
    all_pass = all_pass && report.pass;
    std::printf(
        "%-8s trials=%llu max|dev| vertex=%.3e (%.2f of band) degree=%.3e "
        "(%.2f of band) chi2 p=%.4f  %s\n",
        c.name.c_str(), static_cast<unsigned long long>(report.trials),
        report.max_vertex_deviation, report.max_vertex_band_ratio,
        report.max_degree_deviation, report.max_degree_band_ratio, report.p_value,
        report.pass ? "PASS" : "FAIL");
  }
  return all_pass ? kExitOk : kExitStatFail;
}

int run_verify_clt(const std::string& config_path, std::uint32_t k_flag,
                   std::uint32_t threads, double var_tol) {
  const maxchoice::RunConfig config = maxchoice::load_run_config(config_path);
  const std::uint32_t k = k_flag > 0 ? k_flag : config.k_max;
  const maxchoice::CltVerifyReport report =
      maxchoice::verify_clt(config.params, k, config.horizon, config.replicas,
                            config.master_seed, threads, var_tol);
  std::printf("k=%u n=%llu replicas=%u\n", report.k,
              static_cast<unsigned long long>(report.n), report.replicas);
  for (std::uint32_t j = 0; j < k; ++j)
    std::printf(
        "  j=%u rho*=%.9f mean=%.9f (tol %.2e)  V=%.6f cov=%.6f  skew=%+.3f "
        "kurt=%+.3f\n",
        j + 1, report.rho_star[j], report.empirical_mean[j],
        report.mean_tolerance[j], report.limit_theory(j, j),
        report.limit_empirical(j, j), report.skewness[j],
        report.excess_kurtosis[j]);
  std::printf("max diag rel err %.4f (tol %.2f), max offdiag abs err %.4f\n",
              report.max_diag_rel_error, report.diag_rel_tol,
              report.max_offdiag_abs_error);
  std::printf("mean %s, variance %s -> %s\n", report.mean_pass ? "PASS" : "FAIL",
              report.variance_pass ? "PASS" : "FAIL",
              report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitOk : kExitStatFail;
}

int run_verify_hub(const std::string& config_path, std::uint32_t threads,
                   double min_fraction) {
  maxchoice::RunConfig config = maxchoice::load_run_config(config_path);
  config.trackers.leader = true;
  const maxchoice::EnsembleResult result = maxchoice::run_ensemble(config, threads);
  const maxchoice::HubReport report =
      maxchoice::hub_report(result.trajectories, config.horizon);
  std::printf("replicas=%u horizon=%llu\n", report.replicas,
              static_cast<unsigned long long>(report.horizon));
  std::printf("zero-late-change fraction %.3f (threshold %.3f)\n",
              report.zero_late_fraction, min_fraction);
  std::printf("decade change totals:");
  for (std::size_t d = 0; d < report.aggregate_decade_changes.size(); ++d)
    if (report.aggregate_decade_changes[d] > 0)
      std::printf(" 1e%zu:%llu", d,
                  static_cast<unsigned long long>(report.aggregate_decade_changes[d]));
  std::printf("\n");
  const bool pass = report.zero_late_fraction >= min_fraction;
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitStatFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-choice preferential attachment: simulator and theory engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint32_t threads = 0;
  bool snapshot = false;
  std::uint32_t k_flag = 0;
  std::uint64_t trials = 1000000;
  double var_tol = 0.15;
  double min_fraction = 0.9;

  CLI::App* simulate = app.add_subcommand("simulate", "run replicas, write CSVs");
  simulate->add_option("--config", config_path, "config file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--threads", threads, "worker threads (0 = hardware)");
  simulate->add_flag("--snapshot", snapshot, "also dump final degrees of replica 0");

  CLI::App* theory = app.add_subcommand("theory", "regime classification report");
  theory->add_option("--config", config_path, "config file")->required();

  CLI::App* clt = app.add_subcommand("clt", "degree-count limit theory report");
  clt->add_option("--config", config_path, "config file")->required();
  clt->add_option("--k", k_flag, "truncation level (default: run.k_max)");
  clt->add_option("--out", out_dir, "output directory");

  CLI::App* verify = app.add_subcommand("verify", "statistical verification suites");
  verify->require_subcommand(1);
  CLI::App* v_onestep = verify->add_subcommand("onestep", "one-step law check");
  v_onestep->add_option("--config", config_path, "config file")->required();
  v_onestep->add_option("--trials", trials, "draws per frozen state");
  CLI::App* v_clt = verify->add_subcommand("clt", "degree-count limit check");
  v_clt->add_option("--config", config_path, "config file")->required();
  v_clt->add_option("--k", k_flag, "truncation level (default: run.k_max)");
  v_clt->add_option("--threads", threads, "worker threads (0 = hardware)");
  v_clt->add_option("--var-tol", var_tol, "relative tolerance on diagonal of V");
  CLI::App* v_hub = verify->add_subcommand("hub", "leader persistence check");
  v_hub->add_option("--config", config_path, "config file")->required();
  v_hub->add_option("--threads", threads, "worker threads (0 = hardware)");
  v_hub->add_option("--min-fraction", min_fraction,
                    "required zero-late-change fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(config_path, out_dir, threads, snapshot);
    if (theory->parsed()) return run_theory(config_path);
    if (clt->parsed()) return run_clt(config_path, k_flag, out_dir);
    if (verify->parsed()) {
      if (v_onestep->parsed()) return run_verify_onestep(config_path, trials);
      if (v_clt->parsed()) return run_verify_clt(config_path, k_flag, threads, var_tol);
      if (v_hub->parsed()) return run_verify_hub(config_path, threads, min_fraction);
    }
  } catch (const maxchoice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
