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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace maxchoice {

// Running mean/central moments up to order 4 (one-pass update formulas),
// enough for variance plus skew/kurtosis diagnostics.
class OnlineMoments {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(count_);
    count_ += 1;
    const double n = static_cast<double>(count_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_ -
           4 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
    m2_ += term1;
  }

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }

  // Unbiased sample variance.
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }

  double skewness() const {
    if (count_ < 2 || m2_ <= 0) return 0.0;
    const double n = static_cast<double>(count_);
    return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
  }

  double excess_kurtosis() const {
    if (count_ < 2 || m2_ <= 0) return 0.0;
    const double n = static_cast<double>(count_);
    return n * m4_ / (m2_ * m2_) - 3.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

// Least-squares slope of y against x.
inline double least_squares_slope(std::span<const double> x,
                                  std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: degenerate x");
  return sxy / sxx;
}

namespace detail {

// Regularized lower incomplete gamma P(a,x) by series expansion.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
inline double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_q: a>0, x>=0 required");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x)
                     : detail::gamma_q_cf(a, x);
}

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_pvalue(double statistic, double dof) {
  if (statistic < 0.0) return 1.0;
  return gamma_q(dof / 2.0, statistic / 2.0);
}

// Half-width of a 5-sigma band around a binomial proportion p at `trials`.
inline double binomial_5sigma(double p, std::uint64_t trials) {
  return 5.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

// Pearson chi-square statistic of observed counts vs expected probabilities.
// Cells with negligible expectation are pooled into their neighbor's tail to
// keep the statistic well defined.
inline double chi_square_statistic(std::span<const std::uint64_t> observed,
                                   std::span<const double> probability,
                                   std::uint64_t trials) {
  if (observed.size() != probability.size())
    throw std::invalid_argument("chi_square_statistic: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probability[i] * static_cast<double>(trials);
    if (expected < 1e-9) continue;
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace maxchoice
