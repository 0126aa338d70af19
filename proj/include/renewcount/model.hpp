#pragma once

// Model families for count regression and the mean link.
//
// Each family has a short vector of base parameters on an unconstrained
// scale; covariates enter through a linear predictor eta = b'x that scales
// the event rate: alpha_i = alpha e^eta for the gamma families and
// (mu_i, lambda_i) = (mu, lambda) e^-eta for the inverse Gaussian ones, so
// the ERP mean is always proportional to e^eta.
//
//   family              base parameters
//   poisson             log alpha
//   rp-gamma, erp-gamma log alpha, log beta
//   rp-gamma-hurdle     log alpha, log beta, log(beta + delta)
//   erp-gamma-beta-mix  log alpha, log beta1, log beta2, logit w
//   erp-gamma-alpha-mix log alpha1, log alpha2, log beta, logit w
//   rp-ig, erp-ig       log mu, log lambda

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "renewcount/gamma_renewal.hpp"
#include "renewcount/ig_renewal.hpp"
#include "renewcount/rng.hpp"
#include "renewcount/sampling.hpp"
#include "renewcount/specfun.hpp"

namespace renewcount {

enum class Family {
  Poisson,
  RPGamma,
  ERPGamma,
  ERPGammaBetaMixture,
  ERPGammaAlphaMixture,
  RPGammaHurdle,
  RPIG,
  ERPIG,
};

inline constexpr std::array<Family, 8> kAllFamilies{
    Family::Poisson,       Family::RPGamma,
    Family::ERPGamma,      Family::ERPGammaBetaMixture,
    Family::ERPGammaAlphaMixture, Family::RPGammaHurdle,
    Family::RPIG,          Family::ERPIG};

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Poisson: return "poisson";
    case Family::RPGamma: return "rp-gamma";
    case Family::ERPGamma: return "erp-gamma";
    case Family::ERPGammaBetaMixture: return "erp-gamma-beta-mixture";
    case Family::ERPGammaAlphaMixture: return "erp-gamma-alpha-mixture";
    case Family::RPGammaHurdle: return "rp-gamma-hurdle";
    case Family::RPIG: return "rp-ig";
    case Family::ERPIG: return "erp-ig";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

struct ModelSpec {
  Family family = Family::ERPGamma;
  double t = 1.0;    ///< exposure
  int hurdle_m = 1;  ///< index of the modified interarrival (hurdle family)

  void validate() const {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("ModelSpec: t must be positive");
    if (family == Family::RPGammaHurdle && hurdle_m < 1) {
      throw DomainError("ModelSpec: hurdle m must be >= 1");
    }
  }
};

inline std::size_t base_parameter_count(Family f) {
  switch (f) {
    case Family::Poisson: return 1;
    case Family::RPGamma:
    case Family::ERPGamma:
    case Family::RPIG:
    case Family::ERPIG: return 2;
    case Family::RPGammaHurdle: return 3;
    case Family::ERPGammaBetaMixture:
    case Family::ERPGammaAlphaMixture: return 4;
  }
  return 0;
}

/// Names of the base parameters on the optimizer's scale.
inline std::vector<std::string> transformed_parameter_names(Family f) {
  switch (f) {
    case Family::Poisson: return {"log_alpha"};
    case Family::RPGamma:
    case Family::ERPGamma: return {"log_alpha", "log_beta"};
    case Family::RPGammaHurdle: return {"log_alpha", "log_beta", "log_beta_plus_delta"};
    case Family::ERPGammaBetaMixture: return {"log_alpha", "log_beta", "log_beta2", "logit_w"};
    case Family::ERPGammaAlphaMixture: return {"log_alpha", "log_alpha2", "log_beta", "logit_w"};
    case Family::RPIG:
    case Family::ERPIG: return {"log_mu", "log_lambda"};
  }
  return {};
}

/// Names of the base parameters on their natural scale.
inline std::vector<std::string> natural_parameter_names(Family f) {
  switch (f) {
    case Family::Poisson: return {"alpha"};
    case Family::RPGamma:
    case Family::ERPGamma: return {"alpha", "beta"};
    case Family::RPGammaHurdle: return {"alpha", "beta", "delta"};
    case Family::ERPGammaBetaMixture: return {"alpha", "beta", "beta2", "w"};
    case Family::ERPGammaAlphaMixture: return {"alpha", "alpha2", "beta", "w"};
    case Family::RPIG:
    case Family::ERPIG: return {"mu", "lambda"};
  }
  return {};
}

/// How the linear predictor acts on base parameter k: +1 multiplies by
/// e^eta, -1 divides, 0 leaves it alone.
inline int link_sign(Family f, std::size_t k) {
  switch (f) {
    case Family::RPIG:
    case Family::ERPIG: return -1;
    case Family::ERPGammaAlphaMixture: return k <= 1 ? 1 : 0;
    default: return k == 0 ? 1 : 0;
  }
}

/// True when E(N | x) is exactly proportional to e^eta.
inline bool mean_is_log_linear(Family f) {
  return f != Family::RPGamma && f != Family::RPGammaHurdle && f != Family::RPIG;
}

inline double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double logit(double w) { return std::log(w / (1.0 - w)); }

namespace detail {

inline double poisson_log_pmf(int n, double rate) {
  if (n == 0) return -rate;
  return n * std::log(rate) - rate - specfun::log_gamma(n + 1.0);
}

/// Sum of F^(n)(t) over n >= 1, the mean of an ordinary renewal count.
template <class CdfFn>
double rp_mean(CdfFn&& cdf) {
  double sum = 0.0;
  for (int n = 1; n < 1'000'000; ++n) {
    const double term = cdf(n);
    sum += term;
    if (term < 1e-17 * (1.0 + sum)) return sum;
  }
  throw NumericalFailure("rp_mean: series did not converge");
}

}  // namespace detail

/// A fully specified count distribution for one observation.
struct CountDistribution {
  Family family = Family::Poisson;
  GammaRenewalParams gamma;   ///< Poisson, gamma families (component 1 for mixtures)
  GammaMixtureSpec mixture;   ///< mixture families
  HurdleSpec hurdle;          ///< hurdle family
  IGRenewalParams ig;         ///< inverse Gaussian families

  [[nodiscard]] double pmf(int n) const {
    switch (family) {
      case Family::Poisson:
        detail::check_count(n, 0, "poisson pmf");
        return std::exp(detail::poisson_log_pmf(n, gamma.alpha * gamma.t));
      case Family::RPGamma: return rp_gamma_pmf(n, gamma);
      case Family::ERPGamma: return erp_gamma_pmf(n, gamma);
      case Family::RPGammaHurdle: return rp_gamma_hurdle_pmf(n, gamma, hurdle);
      case Family::ERPGammaBetaMixture:
      case Family::ERPGammaAlphaMixture: return erp_gamma_mixture_pmf(n, mixture);
      case Family::RPIG: return rp_ig_pmf(n, ig);
      case Family::ERPIG: return erp_ig_pmf(n, ig);
    }
    return 0.0;
  }

  [[nodiscard]] double log_pmf(int n) const {
    if (family == Family::Poisson) {
      detail::check_count(n, 0, "poisson pmf");
      return detail::poisson_log_pmf(n, gamma.alpha * gamma.t);
    }
    return std::log(pmf(n));
  }

  /// G_n = Prob(N >= n).
  [[nodiscard]] double survival(int n) const {
    switch (family) {
      case Family::Poisson:
        detail::check_count(n, 0, "poisson survival");
        return n == 0 ? 1.0 : specfun::reg_lower_inc_gamma(n, gamma.alpha * gamma.t);
      case Family::RPGamma: return rp_gamma_count_survival(n, gamma);
      case Family::ERPGamma: return erp_gamma_count_survival(n, gamma);
      case Family::RPGammaHurdle: return rp_gamma_hurdle_count_survival(n, gamma, hurdle);
      case Family::ERPGammaBetaMixture:
      case Family::ERPGammaAlphaMixture: return erp_gamma_mixture_count_survival(n, mixture);
      case Family::RPIG: return rp_ig_count_survival(n, ig);
      case Family::ERPIG: return erp_ig_count_survival(n, ig);
    }
    return 0.0;
  }

  [[nodiscard]] CountTable table() const {
    switch (family) {
      case Family::Poisson: return rp_gamma_table(GammaRenewalParams{gamma.alpha, 1.0, gamma.t});
      case Family::RPGamma: return rp_gamma_table(gamma);
      case Family::ERPGamma: return erp_gamma_table(gamma);
      case Family::RPGammaHurdle: return rp_gamma_hurdle_table(gamma, hurdle);
      case Family::ERPGammaBetaMixture:
      case Family::ERPGammaAlphaMixture: return erp_gamma_mixture_table(mixture);
      case Family::RPIG: return rp_ig_table(ig);
      case Family::ERPIG: return erp_ig_table(ig);
    }
    return {};
  }

  [[nodiscard]] double mean() const {
    switch (family) {
      case Family::Poisson: return gamma.alpha * gamma.t;
      case Family::ERPGamma: return gamma.expected_count();
      case Family::ERPGammaBetaMixture:
      case Family::ERPGammaAlphaMixture:
        return mixture.w * mixture.component1.expected_count() +
               (1.0 - mixture.w) * mixture.component2.expected_count();
      case Family::ERPIG: return ig.t / ig.mu;
      case Family::RPGamma:
        return detail::rp_mean([&](int n) { return gamma_sum_cdf(n, gamma.t, gamma); });
      case Family::RPGammaHurdle:
        return detail::rp_mean(
            [&](int n) { return rp_gamma_hurdle_count_survival(n, gamma, hurdle); });
      case Family::RPIG:
        return detail::rp_mean([&](int n) { return ig_sum_cdf(n, ig.t, ig); });
    }
    return 0.0;
  }

  [[nodiscard]] std::int64_t sample(RngStream& rng) const {
    switch (family) {
      case Family::Poisson: return sample_rp_count(GammaRenewalParams{gamma.alpha, 1.0, gamma.t}, rng);
      case Family::RPGamma: return sample_rp_count(gamma, rng);
      case Family::ERPGamma: return sample_erp_count(gamma, rng);
      case Family::RPGammaHurdle: return sample_rp_hurdle_count(gamma, hurdle, rng);
      case Family::ERPGammaBetaMixture:
      case Family::ERPGammaAlphaMixture: return sample_erp_mixture_count(mixture, rng);
      case Family::RPIG: return sample_rp_count(ig, rng);
      case Family::ERPIG: return sample_erp_count(ig, rng);
    }
    return 0;
  }
};

/// Per-observation distribution from base parameters (transformed scale)
/// and the linear predictor eta = b'x. Throws DomainError when the implied
/// parameters are not positive and finite.
inline CountDistribution mean_link(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& base,
                                   double eta) {
  const std::size_t k = base_parameter_count(spec.family);
  if (static_cast<std::size_t>(base.size()) < k) throw DomainError("mean_link: too few parameters");
  if (!std::isfinite(eta)) throw DomainError("mean_link: non-finite linear predictor");
  auto scaled = [&](std::size_t i) {
    const double v = std::exp(base[static_cast<Eigen::Index>(i)] + link_sign(spec.family, i) * eta);
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("mean_link: parameter out of range");
    return v;
  };
  CountDistribution d;
  d.family = spec.family;
  const double t = spec.t;
  switch (spec.family) {
    case Family::Poisson:
      d.gamma = {scaled(0), 1.0, t};
      d.gamma.validate();
      break;
    case Family::RPGamma:
    case Family::ERPGamma:
      d.gamma = {scaled(0), scaled(1), t};
      d.gamma.validate();
      break;
    case Family::RPGammaHurdle:
      d.gamma = {scaled(0), scaled(1), t};
      d.hurdle = {spec.hurdle_m, scaled(2) - d.gamma.beta};
      d.gamma.validate();
      d.hurdle.validate(d.gamma);
      break;
    case Family::ERPGammaBetaMixture: {
      const double alpha = scaled(0);
      d.mixture = {{alpha, scaled(1), t}, {alpha, scaled(2), t}, logistic(base[3])};
      d.gamma = d.mixture.component1;
      d.mixture.validate();
      break;
    }
    case Family::ERPGammaAlphaMixture: {
      const double beta = scaled(2);
      d.mixture = {{scaled(0), beta, t}, {scaled(1), beta, t}, logistic(base[3])};
      d.gamma = d.mixture.component1;
      d.mixture.validate();
      break;
    }
    case Family::RPIG:
    case Family::ERPIG:
      d.ig = {scaled(0), scaled(1), t};
      d.ig.validate();
      break;
  }
  return d;
}

/// Natural-scale values of the base parameters.
inline Eigen::VectorXd natural_parameters(Family f, const Eigen::Ref<const Eigen::VectorXd>& base) {
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(f));
  Eigen::VectorXd out = base.head(k).array().exp();
  if (f == Family::RPGammaHurdle) out[2] = std::exp(base[2]) - std::exp(base[1]);
  if (f == Family::ERPGammaBetaMixture || f == Family::ERPGammaAlphaMixture) {
    out[3] = logistic(base[3]);
  }
  return out;
}

/// Jacobian of natural_parameters with respect to the base parameters.
inline Eigen::MatrixXd natural_jacobian(Family f, const Eigen::Ref<const Eigen::VectorXd>& base) {
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(f));
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) jac(i, i) = std::exp(base[i]);
  if (f == Family::RPGammaHurdle) jac(2, 1) = -std::exp(base[1]);
  if (f == Family::ERPGammaBetaMixture || f == Family::ERPGammaAlphaMixture) {
    const double w = logistic(base[3]);
    jac(3, 3) = w * (1.0 - w);
  }
  return jac;
}

/// Base parameters (transformed scale) from natural-scale values.
inline Eigen::VectorXd base_from_natural(Family f, const Eigen::Ref<const Eigen::VectorXd>& natural) {
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(f));
  if (natural.size() != k) throw DomainError("base_from_natural: wrong parameter count");
  Eigen::VectorXd base(k);
  for (Eigen::Index i = 0; i < k; ++i) base[i] = std::log(natural[i]);
  if (f == Family::RPGammaHurdle) base[2] = std::log(natural[1] + natural[2]);
  if (f == Family::ERPGammaBetaMixture || f == Family::ERPGammaAlphaMixture) {
    base[3] = logit(natural[3]);
  }
  if (!base.allFinite()) throw DomainError("base_from_natural: parameter out of range");
  return base;
}

}  // namespace renewcount
