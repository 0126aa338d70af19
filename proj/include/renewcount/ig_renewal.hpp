#pragma once

// Count distributions of renewal processes with inverse Gaussian
// interarrival times IG(mu, lambda): mean mu, variance mu^3 / lambda.
//
// The sum of n iid IG(mu, lambda) variables is IG(n mu, n^2 lambda), so
// F^(n) is the IG cdf with those parameters, and
//
//   K_n = int_0^t F^(n)(u) du
//       = (t - n mu) Phi(z1) + (t + n mu) exp(2 n lambda / mu) Phi(z2),
//
// with z1, z2 evaluated at (n mu, n^2 lambda). This follows from
// int_0^t F = t F(t) - m F_lb(t), where the length-biased law of
// X ~ IG(m, l) is that of m^2 / X.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "renewcount/count_table.hpp"
#include "renewcount/gamma_renewal.hpp"
#include "renewcount/specfun.hpp"

namespace renewcount {

struct IGRenewalParams {
  double mu = 1.0;      ///< interarrival mean
  double lambda = 1.0;  ///< IG shape
  double t = 1.0;       ///< exposure

  void validate() const {
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(mu) || !ok(lambda) || !ok(t)) {
      throw DomainError("IGRenewalParams: mu, lambda, t must be positive and finite (mu=" +
                        std::to_string(mu) + ", lambda=" + std::to_string(lambda) +
                        ", t=" + std::to_string(t) + ")");
    }
  }

  [[nodiscard]] double mean_interarrival() const { return mu; }
  [[nodiscard]] double expected_count() const { return t / mu; }
};

namespace detail {

struct IgArgs {
  double z1;
  double z2;
  double log_scale;  // 2 l / m
};

inline IgArgs ig_args(double x, double m, double l) {
  const double root = std::sqrt(l / x);
  return {root * (x / m - 1.0), -root * (x / m + 1.0), 2.0 * l / m};
}

// exp(2l/m) Phi(z2) without forming exp(2l/m).
inline double ig_reflected_term(const IgArgs& a) {
  return std::exp(a.log_scale + specfun::log_normal_cdf(a.z2));
}

inline CdfPair ig_cdf_pair(double x, double m, double l) {
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const IgArgs a = ig_args(x, m, l);
  const double reflected = ig_reflected_term(a);
  const double cdf = specfun::normal_cdf(a.z1) + reflected;
  const double survival = specfun::normal_cdf(-a.z1) - reflected;
  return {std::clamp(cdf, 0.0, 1.0), std::clamp(survival, 0.0, 1.0)};
}

}  // namespace detail

/// Inverse Gaussian cdf F(x; mu, lambda) = Phi(z1) + exp(2 lambda/mu) Phi(z2).
inline double ig_cdf(double x, double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 0.0) || !std::isfinite(mu) || !std::isfinite(lambda)) {
    throw DomainError("ig_cdf: mu and lambda must be positive and finite");
  }
  if (std::isnan(x) || x < 0.0) throw DomainError("ig_cdf: x must be >= 0");
  return detail::ig_cdf_pair(x, mu, lambda).cdf;
}

/// Inverse Gaussian density.
inline double ig_pdf(double x, double mu, double lambda) {
  if (!(x > 0.0)) return 0.0;
  const double d = x - mu;
  return std::sqrt(lambda / (2.0 * std::numbers::pi * x * x * x)) *
         std::exp(-lambda * d * d / (2.0 * mu * mu * x));
}

/// Cdf of the sum of n iid IG(mu, lambda) variables, evaluated at x.
inline double ig_sum_cdf(int n, double x, const IGRenewalParams& p) {
  p.validate();
  detail::check_count(n, 1, "ig_sum_cdf");
  return ig_cdf(x, n * p.mu, static_cast<double>(n) * n * p.lambda);
}

/// K_n together with its complement K_n - (t - n mu).
inline IntegralPair integral_K_pair(int n, const IGRenewalParams& p) {
  detail::check_count(n, 1, "integral_K");
  const double m = n * p.mu;
  const double l = static_cast<double>(n) * n * p.lambda;
  const detail::IgArgs a = detail::ig_args(p.t, m, l);
  const double reflected = (p.t + m) * detail::ig_reflected_term(a);
  return {(p.t - m) * specfun::normal_cdf(a.z1) + reflected,
          -(p.t - m) * specfun::normal_cdf(-a.z1) + reflected};
}

/// K_n = int_0^t F^(n)(u) du, n >= 1. Lies in [0, t].
inline double integral_K(int n, const IGRenewalParams& p) {
  p.validate();
  return std::clamp(integral_K_pair(n, p).integral, 0.0, p.t);
}

namespace detail {

inline CdfPair ig_sum_cdf_pair(int n, const IGRenewalParams& p) {
  return ig_cdf_pair(p.t, n * p.mu, static_cast<double>(n) * n * p.lambda);
}

}  // namespace detail

/// Prob(N(t) = n) for the ordinary IG renewal process.
inline double rp_ig_pmf(int n, const IGRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "rp_ig_pmf");
  const CdfPair cur = n == 0 ? CdfPair{1.0, 0.0} : detail::ig_sum_cdf_pair(n, p);
  return detail::checked_probability(detail::rp_pmf_from(cur, detail::ig_sum_cdf_pair(n + 1, p)),
                                     "rp_ig_pmf");
}

inline double rp_ig_count_survival(int n, const IGRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "rp_ig_count_survival");
  return n == 0 ? 1.0 : detail::ig_sum_cdf_pair(n, p).cdf;
}

/// Prob(N(t) = n) for the equilibrium IG renewal process (K_n in place of
/// the gamma I_n).
inline double erp_ig_pmf(int n, const IGRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "erp_ig_pmf");
  if (n == 0) {
    return detail::checked_probability(integral_K_pair(1, p).complement / p.mu, "erp_ig_pmf");
  }
  const IntegralPair prev = n == 1 ? IntegralPair{p.t, 0.0} : integral_K_pair(n - 1, p);
  return detail::checked_probability(
      detail::erp_pmf_from(prev, integral_K_pair(n, p), integral_K_pair(n + 1, p), p.mu),
      "erp_ig_pmf");
}

inline double erp_ig_count_survival(int n, const IGRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "erp_ig_count_survival");
  if (n == 0) return 1.0;
  const IntegralPair prev = n == 1 ? IntegralPair{p.t, 0.0} : integral_K_pair(n - 1, p);
  return detail::checked_probability(detail::erp_survival_from(prev, integral_K_pair(n, p), p.mu),
                                     "erp_ig_count_survival");
}

inline CountTable erp_ig_table(const IGRenewalParams& p) {
  p.validate();
  return build_erp_table([&](std::size_t n) { return integral_K_pair(static_cast<int>(n), p); },
                         p.t, p.mu, truncation_cap(p.expected_count()), "erp_ig_table");
}

inline CountTable rp_ig_table(const IGRenewalParams& p) {
  p.validate();
  return build_rp_table(
      [&](std::size_t n) { return detail::ig_sum_cdf_pair(static_cast<int>(n), p); },
      truncation_cap(p.expected_count()), "rp_ig_table");
}

}  // namespace renewcount
