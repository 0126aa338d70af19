#pragma once

// Moments of the equilibrium renewal counts.
//
// Exact:       var N(t) = (2/mu) sum_{i>=1} I_i(t) + (t/mu)(1 - t/mu)
// Asymptotic:  var N(t) ~ sigma^2 t / mu^3 + 1/6 + sigma^4/(2 mu^4) - kappa_3/(3 mu^3)
//              gamma: alpha t / beta^2 + 1/6 + 1/(2 beta^2) - 2/(3 beta^2)
//              IG:    t / lambda + 1/6 - (mu / lambda)^2 / 2

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "renewcount/count_table.hpp"
#include "renewcount/gamma_renewal.hpp"
#include "renewcount/ig_renewal.hpp"

namespace renewcount {

/// The variance series did not reach its tolerance within the term cap.
class SeriesNotConverged : public NumericalFailure {
 public:
  SeriesNotConverged(const std::string& what, double partial_sum)
      : NumericalFailure(what), partial_sum_(partial_sum) {}
  [[nodiscard]] double partial_sum() const { return partial_sum_; }

 private:
  double partial_sum_;
};

enum class Dispersion { Under, Equi, Over };

inline const char* to_string(Dispersion d) {
  switch (d) {
    case Dispersion::Under: return "underdispersed";
    case Dispersion::Equi: return "equidispersed";
    case Dispersion::Over: return "overdispersed";
  }
  return "?";
}

inline Dispersion classify_dispersion(double mean, double variance, double tol = 1e-8) {
  const double scale = std::max(1.0, std::fabs(mean));
  if (variance > mean + tol * scale) return Dispersion::Over;
  if (variance < mean - tol * scale) return Dispersion::Under;
  return Dispersion::Equi;
}

/// E N(t) = t / mu for the equilibrium process.
inline double erp_mean(const GammaRenewalParams& p) {
  p.validate();
  return p.expected_count();
}

inline double erp_mean(const IGRenewalParams& p) {
  p.validate();
  return p.expected_count();
}

namespace detail {

// (2/mu) sum I_i + (t/mu)(1 - t/mu). Terms with i mu <= t are summed as
// J_i plus the exact sum of (t - i mu), which keeps the large linear part
// out of the floating-point accumulation.
template <class IntegralFn>
double erp_variance_series(IntegralFn&& integral, double t, double mu, std::size_t n_max) {
  const double ratio = t / mu;
  const auto linear_terms = static_cast<std::size_t>(std::floor(ratio));
  double series = 0.0;
  bool converged = false;
  for (std::size_t i = 1; i <= n_max; ++i) {
    const IntegralPair v = integral(i);
    const double term = i <= linear_terms ? v.complement : v.integral;
    series += term;
    if (i > linear_terms && std::fabs(term) < 1e-12 * std::max(std::fabs(series), 1e-300) &&
        i > ratio + 1.0) {
      converged = true;
      break;
    }
  }
  const auto l = static_cast<double>(linear_terms);
  const double linear = l * t - mu * l * (l + 1.0) / 2.0;
  const double variance = (2.0 / mu) * (linear + series) + ratio * (1.0 - ratio);
  if (!converged) {
    throw SeriesNotConverged("erp_variance_exact: series did not converge within " +
                                 std::to_string(n_max) + " terms",
                             variance);
  }
  return variance;
}

inline std::size_t default_series_cap(double mean_count) {
  return 10 * truncation_cap(mean_count);
}

}  // namespace detail

/// Exact variance of the ERP-gamma count. n_max = 0 selects 10 * N_max.
inline double erp_variance_exact(const GammaRenewalParams& p, std::size_t n_max = 0) {
  p.validate();
  if (n_max == 0) n_max = detail::default_series_cap(p.expected_count());
  return detail::erp_variance_series(
      [&](std::size_t i) { return integral_I_pair(static_cast<int>(i), p); }, p.t,
      p.mean_interarrival(), n_max);
}

/// Exact variance of the ERP-IG count (K_i in place of I_i).
inline double erp_variance_exact(const IGRenewalParams& p, std::size_t n_max = 0) {
  p.validate();
  if (n_max == 0) n_max = detail::default_series_cap(p.expected_count());
  return detail::erp_variance_series(
      [&](std::size_t i) { return integral_K_pair(static_cast<int>(i), p); }, p.t, p.mu, n_max);
}

/// Large-alpha t approximation to the ERP-gamma variance. The constant
/// 1/6 + 1/(2 beta^2) - 2/(3 beta^2) is folded to (1 - beta^-2)/6 so that it
/// vanishes exactly at beta = 1.
inline double erp_gamma_variance_asymptotic(const GammaRenewalParams& p) {
  p.validate();
  const double b2 = p.beta * p.beta;
  return p.alpha * p.t / b2 + (1.0 - 1.0 / b2) / 6.0;
}

inline double erp_ig_variance_asymptotic(const IGRenewalParams& p) {
  p.validate();
  const double r = p.mu / p.lambda;
  return p.t / p.lambda + (1.0 / 6.0 - 0.5 * r * r);
}

}  // namespace renewcount
