#pragma once

// Count distributions of renewal processes with gamma interarrival times
// f(t; alpha, beta) = alpha (alpha t)^{beta-1} e^{-alpha t} / Gamma(beta).
//
//   RP-gamma     ordinary process started at an event
//   ERP-gamma    equilibrium (stationary) process, E N(t) = t alpha / beta
//   RP-gamma(m)  ordinary process whose m-th interarrival has shape beta+delta
//   mixture      two-component ERP-gamma mixture
//
// The sum of n interarrivals is gamma(alpha, n beta), so F^(n)(u) is the
// regularized incomplete gamma function P(n beta, alpha u).

#include <cmath>
#include <cstddef>
#include <string>

#include "renewcount/count_table.hpp"
#include "renewcount/specfun.hpp"

namespace renewcount {

struct GammaRenewalParams {
  double alpha = 1.0;  ///< interarrival rate
  double beta = 1.0;   ///< interarrival shape; 1 gives a Poisson process
  double t = 1.0;      ///< exposure

  void validate() const {
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(alpha) || !ok(beta) || !ok(t)) {
      throw DomainError("GammaRenewalParams: alpha, beta, t must be positive and finite (alpha=" +
                        std::to_string(alpha) + ", beta=" + std::to_string(beta) +
                        ", t=" + std::to_string(t) + ")");
    }
  }

  /// Mean interarrival time beta / alpha.
  [[nodiscard]] double mean_interarrival() const { return beta / alpha; }
  /// t / mu, the equilibrium-process mean count.
  [[nodiscard]] double expected_count() const { return t * alpha / beta; }
};

/// Modified m-th interarrival: shape beta + delta.
struct HurdleSpec {
  int m = 1;
  double delta = 0.0;

  void validate(const GammaRenewalParams& p) const {
    if (m < 1) throw DomainError("HurdleSpec: m must be >= 1");
    if (!(delta > -p.beta) || !std::isfinite(delta)) {
      throw DomainError("HurdleSpec: need delta > -beta (delta=" + std::to_string(delta) +
                        ", beta=" + std::to_string(p.beta) + ")");
    }
  }
};

/// w * ERP(component1) + (1 - w) * ERP(component2); both share t.
struct GammaMixtureSpec {
  GammaRenewalParams component1;
  GammaRenewalParams component2;
  double w = 0.5;

  void validate() const {
    component1.validate();
    component2.validate();
    if (!(w > 0.0 && w <= 1.0)) throw DomainError("GammaMixtureSpec: weight must be in (0, 1]");
    if (component1.t != component2.t) {
      throw DomainError("GammaMixtureSpec: components must share the exposure t");
    }
  }
};

namespace detail {

inline void check_count(int n, int min, const char* who) {
  if (n < min) {
    throw DomainError(std::string(who) + ": count index " + std::to_string(n) +
                      " must be >= " + std::to_string(min));
  }
}

// P(shape, x) and Q(shape, x).
inline CdfPair gamma_cdf_pair(double shape, double x) {
  const auto pq = specfun::reg_inc_gamma_pair(shape, x);
  return {pq.lower, pq.upper};
}

// Shape of the sum of the first n interarrivals when the m-th has shape
// beta + delta: n beta + theta(n - m) delta.
inline double hurdle_sum_shape(int n, const GammaRenewalParams& p, const HurdleSpec& h) {
  return n * p.beta + (n >= h.m ? h.delta : 0.0);
}

}  // namespace detail

/// F^(n)(u) = P(n beta, alpha u) for n >= 1.
inline double gamma_sum_cdf(int n, double u, const GammaRenewalParams& p) {
  p.validate();
  detail::check_count(n, 1, "gamma_sum_cdf");
  if (!(u >= 0.0)) throw DomainError("gamma_sum_cdf: u must be >= 0");
  return specfun::reg_lower_inc_gamma(n * p.beta, p.alpha * u);
}

/// I_n = int_0^t F^(n)(u) du and its complement I_n - (t - n beta/alpha).
///
/// Closed form:
///   I_n = (t - n beta/alpha) P(n beta, alpha t)
///         + alpha^{-1} (alpha t)^{n beta} e^{-alpha t} / Gamma(n beta),
/// with the last term evaluated in log space.
inline IntegralPair integral_I_pair(int n, const GammaRenewalParams& p) {
  detail::check_count(n, 1, "integral_I");
  const double shape = n * p.beta;
  const double x = p.alpha * p.t;
  const double shift = p.t - shape / p.alpha;
  const auto pq = specfun::reg_inc_gamma_pair(shape, x);
  const double density_term = std::exp(specfun::log_gamma_kernel(shape, x)) / p.alpha;
  return {shift * pq.lower + density_term, -shift * pq.upper + density_term};
}

/// I_n = int_0^t F^(n)(u) du, n >= 1. Lies in [0, t].
inline double integral_I(int n, const GammaRenewalParams& p) {
  p.validate();
  return std::clamp(integral_I_pair(n, p).integral, 0.0, p.t);
}

/// Prob(N(t) = n) for the ordinary gamma renewal process.
inline double rp_gamma_pmf(int n, const GammaRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "rp_gamma_pmf");
  const double x = p.alpha * p.t;
  const CdfPair cur = n == 0 ? CdfPair{1.0, 0.0} : detail::gamma_cdf_pair(n * p.beta, x);
  const CdfPair next = detail::gamma_cdf_pair((n + 1) * p.beta, x);
  return detail::checked_probability(detail::rp_pmf_from(cur, next), "rp_gamma_pmf");
}

/// Prob(N(t) >= n) for the ordinary gamma renewal process.
inline double rp_gamma_count_survival(int n, const GammaRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "rp_gamma_count_survival");
  if (n == 0) return 1.0;
  return specfun::reg_lower_inc_gamma(n * p.beta, p.alpha * p.t);
}

/// Prob(N(t) = n) for the equilibrium gamma renewal process:
///   Q_0 = 1 - t/mu + I_1/mu,
///   Q_1 = t/mu + (I_2 - 2 I_1)/mu,
///   Q_n = (I_{n-1} - 2 I_n + I_{n+1})/mu.
inline double erp_gamma_pmf(int n, const GammaRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "erp_gamma_pmf");
  const double mu = p.mean_interarrival();
  if (n == 0) {
    return detail::checked_probability(integral_I_pair(1, p).complement / mu, "erp_gamma_pmf");
  }
  const IntegralPair prev = n == 1 ? IntegralPair{p.t, 0.0} : integral_I_pair(n - 1, p);
  return detail::checked_probability(
      detail::erp_pmf_from(prev, integral_I_pair(n, p), integral_I_pair(n + 1, p), mu),
      "erp_gamma_pmf");
}

/// G_n = Prob(N(t) >= n) for the equilibrium gamma process; G_0 = 1,
/// G_1 = (t - I_1)/mu, G_n = (I_{n-1} - I_n)/mu.
inline double erp_gamma_count_survival(int n, const GammaRenewalParams& p) {
  p.validate();
  detail::check_count(n, 0, "erp_gamma_count_survival");
  if (n == 0) return 1.0;
  const IntegralPair prev = n == 1 ? IntegralPair{p.t, 0.0} : integral_I_pair(n - 1, p);
  return detail::checked_probability(
      detail::erp_survival_from(prev, integral_I_pair(n, p), p.mean_interarrival()),
      "erp_gamma_count_survival");
}

/// Prob(N(t) = n) for the RP-gamma(m) hurdle model:
///   P_0 = 1 - P(beta + theta(1-m) delta, alpha t),
///   P_n = P(n beta + theta(n-m) delta, alpha t)
///         - P((n+1) beta + theta(n+1-m) delta, alpha t).
inline double rp_gamma_hurdle_pmf(int n, const GammaRenewalParams& p, const HurdleSpec& h) {
  p.validate();
  h.validate(p);
  detail::check_count(n, 0, "rp_gamma_hurdle_pmf");
  const double x = p.alpha * p.t;
  const CdfPair cur =
      n == 0 ? CdfPair{1.0, 0.0} : detail::gamma_cdf_pair(detail::hurdle_sum_shape(n, p, h), x);
  const CdfPair next = detail::gamma_cdf_pair(detail::hurdle_sum_shape(n + 1, p, h), x);
  return detail::checked_probability(detail::rp_pmf_from(cur, next), "rp_gamma_hurdle_pmf");
}

/// Prob(N(t) >= n) for the RP-gamma(m) hurdle model.
inline double rp_gamma_hurdle_count_survival(int n, const GammaRenewalParams& p,
                                             const HurdleSpec& h) {
  p.validate();
  h.validate(p);
  detail::check_count(n, 0, "rp_gamma_hurdle_count_survival");
  if (n == 0) return 1.0;
  return specfun::reg_lower_inc_gamma(detail::hurdle_sum_shape(n, p, h), p.alpha * p.t);
}

inline double erp_gamma_mixture_pmf(int n, const GammaMixtureSpec& mix) {
  mix.validate();
  if (mix.w == 1.0) return erp_gamma_pmf(n, mix.component1);
  return mix.w * erp_gamma_pmf(n, mix.component1) +
         (1.0 - mix.w) * erp_gamma_pmf(n, mix.component2);
}

inline double erp_gamma_mixture_count_survival(int n, const GammaMixtureSpec& mix) {
  mix.validate();
  if (mix.w == 1.0) return erp_gamma_count_survival(n, mix.component1);
  return mix.w * erp_gamma_count_survival(n, mix.component1) +
         (1.0 - mix.w) * erp_gamma_count_survival(n, mix.component2);
}

// ---------------------------------------------------------------------------
// Tables: pmf and survival for n = 0..N_max, computing each I_n / F^(n) once.

inline CountTable erp_gamma_table(const GammaRenewalParams& p) {
  p.validate();
  return build_erp_table([&](std::size_t n) { return integral_I_pair(static_cast<int>(n), p); },
                         p.t, p.mean_interarrival(), truncation_cap(p.expected_count()),
                         "erp_gamma_table");
}

inline CountTable rp_gamma_table(const GammaRenewalParams& p) {
  p.validate();
  const double x = p.alpha * p.t;
  return build_rp_table(
      [&](std::size_t n) { return detail::gamma_cdf_pair(static_cast<double>(n) * p.beta, x); },
      truncation_cap(p.expected_count()), "rp_gamma_table");
}

inline CountTable rp_gamma_hurdle_table(const GammaRenewalParams& p, const HurdleSpec& h) {
  p.validate();
  h.validate(p);
  const double x = p.alpha * p.t;
  return build_rp_table(
      [&](std::size_t n) {
        return detail::gamma_cdf_pair(detail::hurdle_sum_shape(static_cast<int>(n), p, h), x);
      },
      truncation_cap(p.expected_count()), "rp_gamma_hurdle_table");
}

/// w * a + (1 - w) * b, padding the shorter table with zero mass.
inline CountTable mix_tables(const CountTable& a, const CountTable& b, double w) {
  const std::size_t len = std::max(a.pmf.size(), b.pmf.size());
  auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
  // Survival beyond a table's end is bounded by its last entry; use it so the
  // remainder stays an upper bound.
  auto surv = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? v[i] : v.back();
  };
  CountTable out;
  out.pmf.resize(len);
  out.survival.resize(len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    out.pmf[i] = w * at(a.pmf, i) + (1.0 - w) * at(b.pmf, i);
  }
  for (std::size_t i = 0; i <= len; ++i) {
    out.survival[i] = w * surv(a.survival, i) + (1.0 - w) * surv(b.survival, i);
  }
  return out;
}

inline CountTable erp_gamma_mixture_table(const GammaMixtureSpec& mix) {
  mix.validate();
  if (mix.w == 1.0) return erp_gamma_table(mix.component1);
  return mix_tables(erp_gamma_table(mix.component1), erp_gamma_table(mix.component2), mix.w);
}

}  // namespace renewcount
