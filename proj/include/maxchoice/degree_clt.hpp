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

#include "maxchoice/linalg.hpp"
#include "maxchoice/tree.hpp"

namespace maxchoice {

// Limit theory for the degree-count vector (N_1(n)/n, ..., N_k(n)/n):
// its fixed point rho*_k, the Jacobian of the drift field G_k with its
// eigenvalues, the one-step noise covariance U*_k, and the limit covariance
// V of sqrt(n+1) (W_k(n) - rho*_k), obtained from a Lyapunov equation.

struct DegreeFixedPoint {
  std::uint32_t k = 0;
  std::vector<double> values;     // x*_1 .. x*_k
  std::vector<double> residuals;  // |g_l| at the solution
};

struct StationaryChoiceLaw {
  std::vector<double> q;  // q_j = limiting P(winner degree = j), j = 1..k
};

struct LyapunovSolution {
  Matrix v;
  double residual = 0.0;
  bool positive_definite = false;
};

struct CltReport {
  std::uint32_t k = 0;
  DegreeFixedPoint fixed_point;
  StationaryChoiceLaw choice_law;
  std::vector<double> partial_sums;  // S_1 .. S_k at the fixed point
  Matrix jacobian;                   // lower triangular
  std::vector<double> eigenvalues;   // its diagonal
  Matrix noise;                      // U*_k
  Matrix limit;                      // V
  double gamma_star = 1.0;
  double lyapunov_residual = 0.0;
  bool limit_positive_definite = false;
};

namespace clt_detail {

// sum_m P(d=m) s^m
inline double law_power_sum(double s, const ChoiceDistribution& d) {
  const auto& values = d.values();
  const auto& probs = d.probabilities();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    acc += probs[i] * std::pow(s, static_cast<double>(values[i]));
  return acc;
}

// sum_m m P(d=m) s^(m-1), with the m=1 term read as P(d=1) at s=0.
inline double law_power_sum_derivative(double s, const ChoiceDistribution& d) {
  const auto& values = d.values();
  const auto& probs = d.probabilities();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto m = static_cast<double>(values[i]);
    acc += m * probs[i] * (values[i] == 1 ? 1.0 : std::pow(s, m - 1.0));
  }
  return acc;
}

inline double weight_fraction(std::uint32_t l, double beta) {
  return (static_cast<double>(l) + beta) / (2.0 + beta);
}

inline void check_simplex(double s_j, std::uint32_t j) {
  if (s_j > 1.0 + 1e-12)
    throw std::domain_error("degree_clt: partial weight S_" + std::to_string(j) +
                            " exceeds 1");
}

}  // namespace clt_detail

// S_l = sum_{j<=l} x_j (j+beta)/(2+beta) for l = 1..x.size().
inline std::vector<double> partial_sums(std::span<const double> x,
                                        const ModelParams& params) {
  std::vector<double> s(x.size());
  double acc = 0.0;
  for (std::uint32_t l = 0; l < x.size(); ++l) {
    acc += x[l] * clt_detail::weight_fraction(l + 1, params.beta);
    s[l] = acc;
  }
  return s;
}

// h_j(x_1..x_j): the limiting probability that the winning candidate has
// degree j when the degree fractions are x. h_0 = 1.
inline double h_eval(std::uint32_t j, std::span<const double> x,
                     const ModelParams& params) {
  if (j == 0) return 1.0;
  if (j > x.size()) throw std::invalid_argument("h_eval: prefix shorter than j");
  double s_prev = 0.0, s_j = 0.0;
  for (std::uint32_t l = 1; l <= j; ++l) {
    if (x[l - 1] < 0.0) throw std::domain_error("h_eval: negative coordinate");
    s_prev = s_j;
    s_j += x[l - 1] * clt_detail::weight_fraction(l, params.beta);
  }
  clt_detail::check_simplex(s_j, j);
  return clt_detail::law_power_sum(s_j, params.d) -
         clt_detail::law_power_sum(s_prev, params.d);
}

// G_k(x): component l is h_{l-1}(x) - h_l(x) - x_l. The components telescope:
// their sum is 1 - h_k(x) - sum_l x_l.
inline std::vector<double> g_vec_eval(std::span<const double> x,
                                      const ModelParams& params) {
  const std::size_t k = x.size();
  std::vector<double> out(k);
  double s = 0.0;
  double p_prev2 = 0.0;  // law_power_sum(S_{l-2})
  double p_prev = 0.0;   // law_power_sum(S_{l-1}); S_0 = 0 gives 0
  for (std::uint32_t l = 1; l <= k; ++l) {
    if (x[l - 1] < 0.0) throw std::domain_error("g_vec_eval: negative coordinate");
    s += x[l - 1] * clt_detail::weight_fraction(l, params.beta);
    clt_detail::check_simplex(s, l);
    const double p_l = clt_detail::law_power_sum(s, params.d);
    const double h_prev = l == 1 ? 1.0 : p_prev - p_prev2;
    const double h_l = p_l - p_prev;
    out[l - 1] = h_prev - h_l - x[l - 1];
    p_prev2 = p_prev;
    p_prev = p_l;
  }
  return out;
}

// Solves G_k = 0 coordinate by coordinate. g_l is strictly decreasing in x_l
// with g_l(0) = h_{l-1} > 0, and the bracket top is the point where S_l
// reaches 1, beyond which no admissible solution exists.
inline DegreeFixedPoint solve_rho_star(std::uint32_t k, const ModelParams& params) {
  if (k < 1) throw std::invalid_argument("solve_rho_star: k >= 1 required");
  DegreeFixedPoint fp;
  fp.k = k;
  fp.values.reserve(k);
  fp.residuals.reserve(k);

  double s_prefix = 0.0;   // S_{l-1}
  double p_prefix2 = 0.0;  // law_power_sum(S_{l-2})
  double p_prefix = 0.0;   // law_power_sum(S_{l-1})
  for (std::uint32_t l = 1; l <= k; ++l) {
    const double c_l = clt_detail::weight_fraction(l, params.beta);
    const double h_prev = l == 1 ? 1.0 : p_prefix - p_prefix2;
    const auto g_l = [&](double x_l) {
      const double p = clt_detail::law_power_sum(s_prefix + x_l * c_l, params.d);
      return h_prev - (p - p_prefix) - x_l;
    };
    double lo = 0.0;
    double hi = (1.0 - s_prefix) / c_l;
    if (!(hi > 0.0) || !(g_l(0.0) > 0.0) || !(g_l(hi) < 0.0))
      throw std::runtime_error("solve_rho_star: root not bracketed at level " +
                               std::to_string(l));
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g_l(mid) > 0.0 ? lo : hi) = mid;
    }
    const double x_l = 0.5 * (lo + hi);
    fp.values.push_back(x_l);
    fp.residuals.push_back(std::fabs(g_l(x_l)));
    s_prefix += x_l * c_l;
    p_prefix2 = p_prefix;
    p_prefix = clt_detail::law_power_sum(s_prefix, params.d);
  }
  return fp;
}

// q_j = h_j(rho*) for j = 1..k.
inline StationaryChoiceLaw stationary_choice_law(std::span<const double> rho,
                                                 const ModelParams& params) {
  StationaryChoiceLaw law;
  law.q.resize(rho.size());
  for (std::uint32_t j = 1; j <= rho.size(); ++j)
    law.q[j - 1] = h_eval(j, rho, params);
  return law;
}

// Lower-triangular Jacobian of G_k at rho, from the analytic partials of the
// power sums. The eigenvalues are the diagonal entries.
inline Matrix jacobian_G(std::span<const double> rho, const ModelParams& params) {
  const std::size_t k = rho.size();
  const std::vector<double> s = partial_sums(rho, params);
  for (std::uint32_t l = 1; l <= k; ++l) clt_detail::check_simplex(s[l - 1], l);

  // t[l] = law_power_sum_derivative(S_l); t[0] uses S_0 = 0.
  std::vector<double> t(k + 1);
  t[0] = clt_detail::law_power_sum_derivative(0.0, params.d);
  for (std::size_t l = 1; l <= k; ++l)
    t[l] = clt_detail::law_power_sum_derivative(s[l - 1], params.d);

  Matrix jac(k, k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double c_i = clt_detail::weight_fraction(static_cast<std::uint32_t>(i),
                                                   params.beta);
    jac(i - 1, i - 1) = -c_i * t[i] - 1.0;
    for (std::size_t j = 1; j < i; ++j) {
      const double c_j = clt_detail::weight_fraction(static_cast<std::uint32_t>(j),
                                                     params.beta);
      const double common = 2.0 * t[i - 1] - t[i];
      jac(i - 1, j - 1) = c_j * (j == i - 1 ? common : common - t[i - 2]);
    }
  }
  return jac;
}

inline std::vector<double> jacobian_eigenvalues(const Matrix& jacobian) {
  std::vector<double> eig(jacobian.rows());
  for (std::size_t i = 0; i < jacobian.rows(); ++i) eig[i] = jacobian(i, i);
  return eig;
}

// One-step noise covariance U*_k at the fixed point. The cross-moments of
// the count increments follow from the update rule: a winner of degree y
// adds a degree-1 vertex (unless y = 1), moves one vertex from bin y to bin
// y+1, and leaves every other bin unchanged. With q_j the stationary winner
// law this gives
//   E(D_1^2)      = 1 - q_1
//   E(D_1 D_2)    = -q_2
//   E(D_1 D_j)    = q_{j-1} - q_j          (j > 2)
//   E(D_i^2)      = q_{i-1} + q_i          (i >= 2)
//   E(D_i D_{i+1}) = -q_i                  (i >= 2)
//   E(D_i D_j)    = 0                      (i, j >= 2, |i-j| >= 2)
// and U*_{ij} = E(D_i D_j) - x*_i x*_j since E(D_i) = x*_i at the fixed point.
inline Matrix noise_covariance(std::span<const double> rho,
                               const ModelParams& params) {
  const std::size_t k = rho.size();
  const StationaryChoiceLaw law = stationary_choice_law(rho, params);
  const auto q = [&](std::size_t j) { return law.q[j - 1]; };

  Matrix u(k, k);
  for (std::size_t i = 1; i <= k; ++i) {
    for (std::size_t j = i; j <= k; ++j) {
      double cross = 0.0;
      if (i == 1 && j == 1) {
        cross = 1.0 - q(1);
      } else if (i == 1 && j == 2) {
        cross = -q(2);
      } else if (i == 1) {
        cross = q(j - 1) - q(j);
      } else if (j == i) {
        cross = q(i - 1) + q(i);
      } else if (j == i + 1) {
        cross = -q(i);
      }
      const double value = cross - rho[i - 1] * rho[j - 1];
      u(i - 1, j - 1) = value;
      u(j - 1, i - 1) = value;
    }
  }
  return u;
}

// Limit covariance V from V (I + 2 g* J)^t + (I + 2 g* J) V = -2 g* U,
// assembled as a dense k^2 x k^2 linear system (k stays small). Requires
// every eigenvalue of J below -1/(2 g*), which the model guarantees through
// lambda_i < -1 at gamma* = 1.
inline LyapunovSolution limit_covariance(const Matrix& jacobian, const Matrix& noise,
                                         double gamma_star = 1.0) {
  const std::size_t k = jacobian.rows();
  if (jacobian.cols() != k || noise.rows() != k || noise.cols() != k)
    throw std::invalid_argument("limit_covariance: shape mismatch");
  for (std::size_t i = 0; i < k; ++i)
    if (!(1.0 + 2.0 * gamma_star * jacobian(i, i) < 0.0))
      throw std::runtime_error(
          "limit_covariance: stability condition violated (eigenvalue >= -1/2g*)");

  Matrix a = Matrix::identity(k) + jacobian.scaled(2.0 * gamma_star);
  Matrix system(k * k, k * k);
  std::vector<double> rhs(k * k);
  const auto idx = [k](std::size_t i, std::size_t j) { return i * k + j; };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < k; ++l) {
        system(idx(i, j), idx(i, l)) += a(j, l);  // V A^t term
        system(idx(i, j), idx(l, j)) += a(i, l);  // A V term
      }
      rhs[idx(i, j)] = -2.0 * gamma_star * noise(i, j);
    }
  }
  const std::vector<double> solution = lu_solve(system, rhs);

  LyapunovSolution out;
  out.v = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      out.v(i, j) = 0.5 * (solution[idx(i, j)] + solution[idx(j, i)]);
  out.residual =
      (out.v * a.transpose() + a * out.v + noise.scaled(2.0 * gamma_star)).max_abs();
  out.positive_definite = cholesky(out.v).has_value();
  return out;
}

// Full pipeline at truncation level k.
inline CltReport compute_clt_report(std::uint32_t k, const ModelParams& params,
                                    double gamma_star = 1.0) {
  CltReport report;
  report.k = k;
  report.fixed_point = solve_rho_star(k, params);
  report.choice_law = stationary_choice_law(report.fixed_point.values, params);
  report.partial_sums = partial_sums(report.fixed_point.values, params);
  report.jacobian = jacobian_G(report.fixed_point.values, params);
  report.eigenvalues = jacobian_eigenvalues(report.jacobian);
  report.noise = noise_covariance(report.fixed_point.values, params);
  const LyapunovSolution lyap =
      limit_covariance(report.jacobian, report.noise, gamma_star);
  report.limit = lyap.v;
  report.gamma_star = gamma_star;
  report.lyapunov_residual = lyap.residual;
  report.limit_positive_definite = lyap.positive_definite;
  return report;
}

}  // namespace maxchoice
