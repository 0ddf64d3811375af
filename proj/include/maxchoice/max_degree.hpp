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
#include <optional>
#include <stdexcept>
#include <string>

#include "maxchoice/tree.hpp"

namespace maxchoice {

// Closed-form predictions for the maximal degree M(n):
//   mean d < 2+beta  =>  M(n) ~ n^(E d/(2+beta))        (subcritical)
//   mean d = 2+beta  =>  M(n) ln n / n -> (2+beta)^2/m2 (critical)
//   mean d > 2+beta  =>  M(n)/n -> x*, f(x*) = x*       (supercritical)
// where f(x) = sum_i P(d=i) (1 - (1 - x/(2+beta))^i).

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

struct RegimeReport {
  Regime regime = Regime::Subcritical;
  double mean_d = 0.0;
  double threshold = 0.0;                     // 2+beta
  std::optional<double> exponent;             // subcritical only
  std::optional<double> x_star;               // supercritical only
  std::optional<double> critical_constant;    // critical only
};

struct ScalingTrackers {
  double c = 0.0;
  double q_value = 0.0;  // exp(c n / M(n)) / n
  double u_value = 0.0;  // n exp(-c n / M(n))
};

namespace detail {

inline void check_f_domain(double x, double beta) {
  if (!(x >= 0.0) || !(x <= 2.0 + beta))
    throw std::domain_error("f: x must lie in [0, 2+beta]");
}

}  // namespace detail

// f(x) as the direct sum over the support. The primary evaluation route.
inline double f_eval(double x, const ModelParams& params) {
  detail::check_f_domain(x, params.beta);
  const double base = 1.0 - x / (2.0 + params.beta);
  const auto& values = params.d.values();
  const auto& probs = params.d.probabilities();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += probs[i] * (1.0 - std::pow(base, static_cast<double>(values[i])));
  return s;
}

// f(x) through the binomial-moment series
//   f(x) = u * sum_j (-u)^(j-1) m_j,  u = x/(2+beta).
// The series is cut once terms fall below 1e-16; the m_j of a finite table
// vanish beyond the top support value, and conditioned-Poisson m_j decay
// factorially, so the cut is always reached.
inline double f_series(double x, const ModelParams& params) {
  detail::check_f_domain(x, params.beta);
  const double u = x / (2.0 + params.beta);
  if (u == 0.0) return 0.0;
  const std::uint32_t j_cap =
      params.d.kind() == ChoiceDistribution::Kind::FiniteTable
          ? params.d.max_value()
          : 600;
  const std::vector<double> moments = params.d.binomial_moments(j_cap);
  double sum = 0.0;
  double sign_power = 1.0;  // (-u)^(j-1)
  for (std::uint32_t j = 1; j <= j_cap; ++j) {
    const double term = sign_power * moments[j - 1];
    sum += term;
    // |term_{j+1}/term_j| = u m_{j+1}/m_j is eventually decreasing, so once
    // terms drop below the cut they stay there.
    if (std::fabs(term) < 1e-16 * (1.0 + std::fabs(sum))) break;
    sign_power *= -u;
  }
  return u * sum;
}

// g(x) = f(x)/x extended continuously with g(0) = E d/(2+beta).
inline double g_eval(double x, const ModelParams& params) {
  detail::check_f_domain(x, params.beta);
  if (x == 0.0) return params.d.mean() / (2.0 + params.beta);
  return f_eval(x, params) / x;
}

// Unique root of f(x) = x in (0,1). Requires the supercritical regime.
// Bisection: f(x) > x near 0 because g(0) > 1, and f(1) < 1; concavity of f
// makes the sign change unique, so plain bisection is unconditionally safe.
inline double solve_x_star(const ModelParams& params) {
  const double threshold = 2.0 + params.beta;
  if (!(params.d.mean() > threshold))
    throw std::domain_error("solve_x_star: requires mean d > 2+beta");
  double lo = 1e-12;
  double hi = 1.0;
  if (!(f_eval(lo, params) > lo) || !(f_eval(hi, params) < hi))
    throw std::runtime_error("solve_x_star: bracket failed");
  for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f_eval(mid, params) > mid ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Classifies (beta, d). Equality with the threshold is decided at 1e-9:
// exact-rational inputs land exactly, floating Poisson means never straddle
// the boundary that closely.
inline RegimeReport classify_regime(const ModelParams& params) {
  RegimeReport report;
  report.mean_d = params.d.mean();
  report.threshold = 2.0 + params.beta;
  const double gap = report.mean_d - report.threshold;
  if (std::fabs(gap) <= 1e-9) {
    report.regime = Regime::Critical;
    report.critical_constant =
        report.threshold * report.threshold / params.d.binomial_moment(2);
  } else if (gap < 0.0) {
    report.regime = Regime::Subcritical;
    report.exponent = report.mean_d / report.threshold;
  } else {
    report.regime = Regime::Supercritical;
    report.x_star = solve_x_star(params);
  }
  return report;
}

// Critical-regime diagnostics exp(cn/M)/n and n exp(-cn/M); their product is
// identically 1. Near the critical constant c the first stays order-1 when
// M(n) tracks cn/ln n.
inline ScalingTrackers scaling_values(std::uint64_t n, std::uint32_t max_degree,
                                      double c) {
  if (max_degree < 1 || n < 1)
    throw std::invalid_argument("scaling_values: n >= 1 and M >= 1 required");
  if (!(c > 0.0)) throw std::invalid_argument("scaling_values: c > 0 required");
  const double ratio = c * static_cast<double>(n) / static_cast<double>(max_degree);
  ScalingTrackers t;
  t.c = c;
  t.q_value = std::exp(ratio) / static_cast<double>(n);
  t.u_value = static_cast<double>(n) * std::exp(-ratio);
  return t;
}

inline ScalingTrackers scaling_values(const Tree& tree, double c) {
  return scaling_values(tree.n(), tree.max_degree(), c);
}

}  // namespace maxchoice
