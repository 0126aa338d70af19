#pragma once

// Exact random variates for the interarrival laws and the renewal counts.
//
// Ordinary process: draw interarrivals until their sum exceeds t; the count
// is one less than the number of draws. Equilibrium process: the first
// arrival is U * Y with U uniform and Y length-biased (density x f(x)/mu):
// Y ~ gamma(beta + 1, alpha) for gamma interarrivals, Y = mu^2 / X with
// X ~ IG(mu, lambda) for inverse Gaussian ones.

#include <cmath>
#include <cstdint>
#include <string>

#include "renewcount/gamma_renewal.hpp"
#include "renewcount/ig_renewal.hpp"
#include "renewcount/rng.hpp"

namespace renewcount {

/// Gamma(shape, rate) by Marsaglia-Tsang squeeze/rejection; shapes below 1
/// use the G(shape + 1) * U^{1/shape} boost.
inline double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("sample_gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rate, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

/// IG(mu, lambda) by the Michael-Schucany-Haas transformation with multiple
/// roots. The smaller root is written in a cancellation-free form.
inline double sample_ig(double mu, double lambda, RngStream& rng) {
  if (!(mu > 0.0) || !(lambda > 0.0)) {
    throw DomainError("sample_ig: mu and lambda must be positive");
  }
  const double nu = rng.normal();
  const double y = nu * nu;
  const double my = mu * y;
  const double root = my + std::sqrt(my * my + 4.0 * mu * lambda * y);
  const double x = root > 0.0 ? 4.0 * mu * mu * lambda * y / (root * root) : mu;
  if (rng.uniform() * (mu + x) <= mu) return x;
  return mu * mu / x;
}

namespace detail {

inline constexpr std::int64_t kMaxSampledCount = 100'000'000;

template <class Draw>
std::int64_t count_until_exceeds(double elapsed, double t, Draw&& draw) {
  std::int64_t count = 0;
  while (elapsed <= t) {
    ++count;
    if (count > kMaxSampledCount) throw NumericalFailure("renewal sampler: count overflow");
    elapsed += draw(count);
  }
  return count;
}

}  // namespace detail

/// Time to the first event of the equilibrium gamma process.
inline double sample_erp_first_arrival(const GammaRenewalParams& p, RngStream& rng) {
  return rng.uniform() * sample_gamma(p.beta + 1.0, p.alpha, rng);
}

/// Time to the first event of the equilibrium IG process.
inline double sample_erp_first_arrival(const IGRenewalParams& p, RngStream& rng) {
  const double x = sample_ig(p.mu, p.lambda, rng);
  return rng.uniform() * (p.mu * p.mu / x);
}

inline std::int64_t sample_rp_count(const GammaRenewalParams& p, RngStream& rng) {
  p.validate();
  return detail::count_until_exceeds(0.0, p.t, [&](std::int64_t) {
           return sample_gamma(p.beta, p.alpha, rng);
         }) - 1;
}

inline std::int64_t sample_rp_count(const IGRenewalParams& p, RngStream& rng) {
  p.validate();
  return detail::count_until_exceeds(0.0, p.t, [&](std::int64_t) {
           return sample_ig(p.mu, p.lambda, rng);
         }) - 1;
}

inline std::int64_t sample_erp_count(const GammaRenewalParams& p, RngStream& rng) {
  p.validate();
  const double first = sample_erp_first_arrival(p, rng);
  if (first > p.t) return 0;
  return detail::count_until_exceeds(first, p.t, [&](std::int64_t) {
    return sample_gamma(p.beta, p.alpha, rng);
  });
}

inline std::int64_t sample_erp_count(const IGRenewalParams& p, RngStream& rng) {
  p.validate();
  const double first = sample_erp_first_arrival(p, rng);
  if (first > p.t) return 0;
  return detail::count_until_exceeds(first, p.t, [&](std::int64_t) {
    return sample_ig(p.mu, p.lambda, rng);
  });
}

/// Ordinary gamma process whose m-th interarrival has shape beta + delta.
inline std::int64_t sample_rp_hurdle_count(const GammaRenewalParams& p, const HurdleSpec& h,
                                           RngStream& rng) {
  p.validate();
  h.validate(p);
  return detail::count_until_exceeds(0.0, p.t, [&](std::int64_t k) {
           const double shape = k == h.m ? p.beta + h.delta : p.beta;
           return sample_gamma(shape, p.alpha, rng);
         }) - 1;
}

inline std::int64_t sample_erp_mixture_count(const GammaMixtureSpec& mix, RngStream& rng) {
  mix.validate();
  const bool first = rng.uniform() < mix.w;
  return sample_erp_count(first ? mix.component1 : mix.component2, rng);
}

}  // namespace renewcount
