#pragma once

// Machinery shared by the gamma and inverse-Gaussian renewal families.
//
// Ordinary renewal process:  P_n = F^(n)(t) - F^(n+1)(t),  F^(0) = 1.
// Equilibrium process:       Q_n = mu^{-1} (I_{n-1} - 2 I_n + I_{n+1}),
//                            G_n = mu^{-1} (I_{n-1} - I_n),  I_0 = t,
// with I_n = int_0^t F^(n)(u) du. Since the second difference of the linear
// term (t - n mu) vanishes, the same formulas hold with the complement
// J_n = I_n - (t - n mu), J_0 = 0. Whichever representation has the
// smaller magnitude is used, so probabilities stay accurate where F^(n) ~ 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "renewcount/specfun.hpp"

namespace renewcount {

/// Probability that the count survival G_n must fall below before a table
/// is truncated.
inline constexpr double kTailTolerance = 1e-10;

/// F^(n)(t) together with its complement 1 - F^(n)(t).
struct CdfPair {
  double cdf;
  double survival;
};

/// I_n = int_0^t F^(n) together with J_n = I_n - (t - n mu).
struct IntegralPair {
  double integral;
  double complement;
};

namespace detail {

inline double checked_probability(double p, const char* who) {
  if (p < -1e-9 || std::isnan(p)) {
    throw NumericalFailure(std::string(who) + ": probability " + std::to_string(p) +
                           " is outside round-off of [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double second_difference(double a, double b, double c) { return a - 2.0 * b + c; }

inline double max_abs(double a, double b, double c) {
  return std::max({std::fabs(a), std::fabs(b), std::fabs(c)});
}

// Q_n from integrals at n-1, n, n+1 (n >= 1).
inline double erp_pmf_from(const IntegralPair& prev, const IntegralPair& cur,
                           const IntegralPair& next, double mu) {
  const double via_integral = second_difference(prev.integral, cur.integral, next.integral);
  const double via_complement =
      second_difference(prev.complement, cur.complement, next.complement);
  const bool use_complement = max_abs(prev.complement, cur.complement, next.complement) <
                              max_abs(prev.integral, cur.integral, next.integral);
  return (use_complement ? via_complement : via_integral) / mu;
}

// G_n from integrals at n-1 and n (n >= 1).
inline double erp_survival_from(const IntegralPair& prev, const IntegralPair& cur, double mu) {
  const double g = (prev.integral - cur.integral) / mu;
  if (g < 0.5) return g;
  return 1.0 + (prev.complement - cur.complement) / mu;
}

inline double rp_pmf_from(const CdfPair& cur, const CdfPair& next) {
  if (cur.cdf > 0.5) return next.survival - cur.survival;
  return cur.cdf - next.cdf;
}

}  // namespace detail

/// Tabulated pmf and count survival G_n = Prob(N >= n) for n = 0..n_max.
/// survival has n_max + 2 entries so that survival.back() is the mass not
/// represented in pmf.
struct CountTable {
  std::vector<double> pmf;
  std::vector<double> survival;

  [[nodiscard]] std::size_t n_max() const { return pmf.empty() ? 0 : pmf.size() - 1; }

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double p : pmf) s += p;
    return s;
  }

  [[nodiscard]] double mean() const {
    double s = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) s += static_cast<double>(n) * pmf[n];
    return s;
  }

  [[nodiscard]] double variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
      const double d = static_cast<double>(n) - m;
      s += d * d * pmf[n];
    }
    return s;
  }
};

/// Truncation cap for a distribution with the given mean count.
inline std::size_t truncation_cap(double mean_count) {
  return static_cast<std::size_t>(std::max(200.0, std::ceil(20.0 * mean_count)));
}

/// Builds the equilibrium-process table from I_n / J_n. `integral(n)` is
/// called for n >= 1 in increasing order.
template <class IntegralFn>
CountTable build_erp_table(IntegralFn&& integral, double t, double mu, std::size_t cap,
                           const char* who) {
  CountTable table;
  IntegralPair prev{t, 0.0};
  IntegralPair cur = integral(std::size_t{1});
  table.survival.push_back(1.0);
  table.pmf.push_back(detail::checked_probability(cur.complement / mu, who));
  for (std::size_t n = 1;; ++n) {
    const IntegralPair next = integral(n + 1);
    const double g = detail::checked_probability(detail::erp_survival_from(prev, cur, mu), who);
    table.survival.push_back(g);
    table.pmf.push_back(detail::checked_probability(detail::erp_pmf_from(prev, cur, next, mu), who));
    if (g < kTailTolerance || n >= cap) {
      table.survival.push_back(
          detail::checked_probability(detail::erp_survival_from(cur, next, mu), who));
      break;
    }
    prev = cur;
    cur = next;
  }
  return table;
}

/// Builds the ordinary renewal-process table from F^(n)(t). `cdf(n)` is
/// called for n >= 1 in increasing order.
template <class CdfFn>
CountTable build_rp_table(CdfFn&& cdf, std::size_t cap, const char* who) {
  CountTable table;
  CdfPair cur{1.0, 0.0};
  table.survival.push_back(1.0);
  for (std::size_t n = 0;; ++n) {
    const CdfPair next = cdf(n + 1);
    table.survival.push_back(detail::checked_probability(next.cdf, who));
    table.pmf.push_back(detail::checked_probability(detail::rp_pmf_from(cur, next), who));
    if (cur.cdf < kTailTolerance || n >= cap) break;
    cur = next;
  }
  return table;
}

}  // namespace renewcount
