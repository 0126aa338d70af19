#pragma once

// Special functions used by the renewal-count distributions: ln Γ, the
// regularized incomplete gamma function and the normal cdf (with a
// log-space tail for the inverse Gaussian cdf).

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace renewcount {

/// Thrown when an argument lies outside the domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a computed quantity is inconsistent beyond round-off
/// (e.g. a probability below -1e-9).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace specfun {

namespace detail {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln sqrt(2 pi)
inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr int kMaxIter = 100000;

// Stirling series, valid for x >= 10 to full double precision.
inline double log_gamma_stirling(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  const double series =
      r * (1.0 / 12 +
           r2 * (-1.0 / 360 +
                 r2 * (1.0 / 1260 +
                       r2 * (-1.0 / 1680 +
                             r2 * (1.0 / 1188 +
                                   r2 * (-691.0 / 360360 + r2 * (1.0 / 156)))))));
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series;
}

// ln of x^a e^{-x} / Γ(a), the common prefactor of both incomplete-gamma
// expansions.
inline double log_gamma_prefactor(double a, double x);

}  // namespace detail

/// ln Γ(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(x));
  }
  if (x >= 10.0) return detail::log_gamma_stirling(x);
  // Shift up: Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1)).
  double prod = 1.0;
  double z = x;
  while (z < 10.0) {
    prod *= z;
    z += 1.0;
  }
  return detail::log_gamma_stirling(z) - std::log(prod);
}

namespace detail {

inline double log_gamma_prefactor(double a, double x) {
  return a * std::log(x) - x - log_gamma(a);
}

// Series for P(a, x); converges for all x but is used for x < a + 1.
inline double lower_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) {
      return sum * std::exp(log_gamma_prefactor(a, x));
    }
  }
  throw NumericalFailure("reg_lower_inc_gamma: series failed to converge");
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
inline double upper_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) {
      return std::exp(log_gamma_prefactor(a, x)) * h;
    }
  }
  throw NumericalFailure("reg_upper_inc_gamma: continued fraction failed to converge");
}

inline void check_inc_gamma_args(double a, double x, const char* who) {
  if (!(a > 0.0) || !std::isfinite(a) || !(x >= 0.0) || std::isnan(x)) {
    throw DomainError(std::string(who) + ": need a > 0 and x >= 0 (a=" +
                      std::to_string(a) + ", x=" + std::to_string(x) + ")");
  }
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
inline double reg_lower_inc_gamma(double a, double x) {
  detail::check_inc_gamma_args(a, x, "reg_lower_inc_gamma");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::lower_series(a, x);
  return 1.0 - detail::upper_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation in the right tail.
inline double reg_upper_inc_gamma(double a, double x) {
  detail::check_inc_gamma_args(a, x, "reg_upper_inc_gamma");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::lower_series(a, x);
  return detail::upper_continued_fraction(a, x);
}

/// P(a, x) and Q(a, x) from a single expansion; the smaller of the two is
/// accurate to relative precision.
struct IncGammaPair {
  double lower;
  double upper;
};

inline IncGammaPair reg_inc_gamma_pair(double a, double x) {
  detail::check_inc_gamma_args(a, x, "reg_inc_gamma_pair");
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  if (x < a + 1.0) {
    const double p = detail::lower_series(a, x);
    return {p, 1.0 - p};
  }
  const double q = detail::upper_continued_fraction(a, x);
  return {1.0 - q, q};
}

/// ln(x^a e^{-x} / Γ(a)) for a > 0, x > 0.
inline double log_gamma_kernel(double a, double x) {
  return detail::log_gamma_prefactor(a, x);
}

/// Standard normal cdf Φ(z).
inline double normal_cdf(double z) {
  if (std::isnan(z)) throw DomainError("normal_cdf: NaN argument");
  return 0.5 * std::erfc(-z * std::numbers::sqrt2 * 0.5);
}

/// ln Φ(z). Finite for all finite z; below z = -20 the Mills-ratio
/// asymptotic series replaces erfc, which underflows near z = -38.
inline double log_normal_cdf(double z) {
  if (std::isnan(z)) throw DomainError("log_normal_cdf: NaN argument");
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z * std::numbers::sqrt2 * 0.5));
  if (z > -20.0) return std::log(normal_cdf(z));
  // Φ(z) = φ(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...)
  const double inv_z2 = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(2.0 * k - 1.0) * inv_z2;
    sum += term;
  }
  return -0.5 * z * z - detail::kHalfLog2Pi - std::log(-z) + std::log(sum);
}

}  // namespace specfun
}  // namespace renewcount
