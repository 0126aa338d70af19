#pragma once

// Maximum-likelihood count regression.
//
// Parameter vector theta = [base parameters (see model.hpp), b_1 .. b_p]
// with E(N | x) driven by eta = b'x. Internally the optimizer works on
// centred and scaled covariate columns; results are mapped back exactly,
// since the reparametrization is linear.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "renewcount/model.hpp"
#include "renewcount/optimize.hpp"
#include "renewcount/specfun.hpp"

namespace renewcount {

inline constexpr double kPmfFloor = 1e-300;

struct RegressionDesign {
  std::vector<int> counts;
  Eigen::MatrixXd covariates;               ///< rows x p; p may be zero
  std::vector<int> censor_at;               ///< empty, or per row: 0 exact, M means "count >= M"
  std::vector<std::string> covariate_names; ///< empty, or one per column

  [[nodiscard]] std::size_t rows() const { return counts.size(); }
  [[nodiscard]] Eigen::Index columns() const { return covariates.cols(); }

  [[nodiscard]] std::string column_name(Eigen::Index j) const {
    if (static_cast<std::size_t>(j) < covariate_names.size()) {
      return covariate_names[static_cast<std::size_t>(j)];
    }
    return "x" + std::to_string(j + 1);
  }

  void validate() const {
    if (counts.empty()) throw DomainError("RegressionDesign: no observations");
    const auto n = static_cast<Eigen::Index>(counts.size());
    if (covariates.cols() > 0 && covariates.rows() != n) {
      throw DomainError("RegressionDesign: covariate rows (" + std::to_string(covariates.rows()) +
                        ") differ from count rows (" + std::to_string(n) + ")");
    }
    if (!covariates.allFinite()) throw DomainError("RegressionDesign: non-finite covariate");
    if (!covariate_names.empty() &&
        covariate_names.size() != static_cast<std::size_t>(covariates.cols())) {
      throw DomainError("RegressionDesign: covariate name count differs from column count");
    }
    if (!censor_at.empty() && censor_at.size() != counts.size()) {
      throw DomainError("RegressionDesign: censor_at length differs from count rows");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] < 0) {
        throw DomainError("RegressionDesign: negative count at row " + std::to_string(i + 1));
      }
      if (!censor_at.empty()) {
        const int m = censor_at[i];
        if (m < 0) {
          throw DomainError("RegressionDesign: negative censoring threshold at row " +
                            std::to_string(i + 1));
        }
        if (m > 0 && counts[i] < m) {
          throw DomainError("RegressionDesign: censored row " + std::to_string(i + 1) +
                            " has count below its threshold");
        }
      }
    }
  }
};

/// Full parameter names: base parameters on the transformed scale, then
/// one coefficient per covariate column.
inline std::vector<std::string> parameter_names(const ModelSpec& spec,
                                                const RegressionDesign& data) {
  std::vector<std::string> names = transformed_parameter_names(spec.family);
  for (Eigen::Index j = 0; j < data.columns(); ++j) names.push_back(data.column_name(j));
  return names;
}

namespace detail {

struct Cell {
  int count = 0;
  int censor = 0;
  double weight = 0.0;
};

struct Pattern {
  Eigen::VectorXd x;
  std::vector<Cell> cells;
};

/// Groups rows with identical covariates, and within a group identical
/// (count, censor) pairs, into weighted cells. Order is deterministic.
inline std::vector<Pattern> group_rows(const Eigen::MatrixXd& x, const std::vector<int>& counts,
                                       const std::vector<int>& censor) {
  std::map<std::vector<double>, std::map<std::pair<int, int>, double>> groups;
  const Eigen::Index p = x.cols();
  std::vector<double> key(static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      key[static_cast<std::size_t>(j)] = x(static_cast<Eigen::Index>(i), j);
    }
    const int m = censor.empty() ? 0 : censor[i];
    groups[key][{m > 0 ? m : counts[i], m}] += 1.0;
  }
  std::vector<Pattern> out;
  out.reserve(groups.size());
  for (const auto& [xs, cells] : groups) {
    Pattern pat;
    pat.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), p);
    for (const auto& [key2, w] : cells) pat.cells.push_back({key2.first, key2.second, w});
    out.push_back(std::move(pat));
  }
  return out;
}

}  // namespace detail

/// Log-likelihood of a fixed design as a function of theta.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(ModelSpec spec, const Eigen::MatrixXd& covariates,
                      const std::vector<int>& counts, const std::vector<int>& censor_at)
      : spec_(spec),
        base_count_(static_cast<Eigen::Index>(base_parameter_count(spec.family))),
        columns_(covariates.cols()),
        patterns_(detail::group_rows(covariates, counts, censor_at)) {
    spec_.validate();
  }

  [[nodiscard]] Eigen::Index parameter_count() const { return base_count_ + columns_; }
  [[nodiscard]] std::size_t pattern_count() const { return patterns_.size(); }

  /// Sum of log pmf (or log G_M for censored rows); -inf at invalid points.
  /// `underflow` is set when some probability fell below the floor.
  double operator()(const Eigen::VectorXd& theta, bool* underflow = nullptr) const {
    if (theta.size() != parameter_count()) {
      throw DomainError("log_likelihood: expected " + std::to_string(parameter_count()) +
                        " parameters, got " + std::to_string(theta.size()));
    }
    constexpr double kInvalid = -std::numeric_limits<double>::infinity();
    if (!theta.allFinite()) return kInvalid;
    const Eigen::VectorXd base = theta.head(base_count_);
    const Eigen::VectorXd b = theta.tail(columns_);
    double total = 0.0;
    try {
      for (const auto& pat : patterns_) {
        const double eta = columns_ > 0 ? pat.x.dot(b) : 0.0;
        if (std::fabs(eta) > 700.0) return kInvalid;
        const CountDistribution dist = mean_link(spec_, base, eta);
        for (const auto& cell : pat.cells) {
          double lp;
          if (cell.censor > 0) {
            lp = std::log(dist.survival(cell.censor));
          } else {
            lp = dist.log_pmf(cell.count);
          }
          if (!(lp >= std::log(kPmfFloor))) {
            if (std::isnan(lp)) return kInvalid;
            lp = std::log(kPmfFloor);
            if (underflow != nullptr) *underflow = true;
          }
          total += cell.weight * lp;
        }
      }
    } catch (const DomainError&) {
      return kInvalid;
    } catch (const NumericalFailure&) {
      return kInvalid;
    }
    return total;
  }

 private:
  ModelSpec spec_;
  Eigen::Index base_count_;
  Eigen::Index columns_;
  std::vector<detail::Pattern> patterns_;
};

inline double log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& theta,
                             const RegressionDesign& data) {
  data.validate();
  return LikelihoodEvaluator(spec, data.covariates, data.counts, data.censor_at)(theta);
}

/// Draws one count per row from the model at theta; row i uses the
/// independent stream rng.split(i), so results do not depend on order.
/// With no covariate columns, `rows` counts are drawn.
inline std::vector<int> simulate_counts(const ModelSpec& spec, const Eigen::VectorXd& theta,
                                        const Eigen::MatrixXd& covariates, std::size_t rows,
                                        const RngStream& rng) {
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(spec.family));
  const Eigen::Index p = covariates.cols();
  if (theta.size() != k + p) throw DomainError("simulate_counts: theta has the wrong length");
  if (p > 0) rows = static_cast<std::size_t>(covariates.rows());
  const Eigen::VectorXd base = theta.head(k);
  const Eigen::VectorXd b = theta.tail(p);
  std::vector<int> out(rows);
  std::optional<CountDistribution> shared;
  if (p == 0) shared = mean_link(spec, base, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    RngStream stream = rng.split(i);
    const CountDistribution dist =
        shared ? *shared : mean_link(spec, base, covariates.row(static_cast<Eigen::Index>(i)).dot(b));
    const std::int64_t n = dist.sample(stream);
    if (n > std::numeric_limits<int>::max()) throw NumericalFailure("simulate_counts: count overflow");
    out[i] = static_cast<int>(n);
  }
  return out;
}

struct FitOptions {
  OptimizerOptions optimizer;
  /// Full theta to start from; skips the multi-start search.
  std::optional<Eigen::VectorXd> start;
  bool compute_covariance = true;
  bool compute_marginal_effects = true;
  /// Covariate row for marginal effects; defaults to the column means.
  std::optional<Eigen::VectorXd> effects_at;
};

struct ParameterEstimate {
  std::string name;
  double estimate = 0.0;
  double se = std::numeric_limits<double>::quiet_NaN();
};

struct MarginalEffect {
  std::string name;
  double effect = 0.0;
  double se = std::numeric_limits<double>::quiet_NaN();
};

struct CovarianceResult {
  Eigen::MatrixXd matrix;
  bool available = false;      ///< negative Hessian was positive definite
  bool pseudo_inverse = false; ///< matrix is a pseudo-inverse
};

struct FitResult {
  ModelSpec spec;
  std::vector<std::string> parameter_names;  ///< transformed base names, then covariates
  Eigen::VectorXd theta;                     ///< transformed scale
  Eigen::MatrixXd covariance;                ///< of theta
  bool covariance_available = false;
  bool covariance_pseudo_inverse = false;

  std::vector<ParameterEstimate> natural;       ///< base parameters, natural scale
  std::vector<ParameterEstimate> coefficients;  ///< regression coefficients

  double minus_loglik = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool pmf_underflow = false;
  int iterations = 0;
  int evaluations = 0;
  int starts = 0;
  std::size_t observations = 0;

  Eigen::VectorXd covariate_means;
  double mean_at_means = 0.0;  ///< E(N | x = covariate means)
  double eta0 = 0.0;           ///< E(N | x = 0)
  std::vector<MarginalEffect> marginal_effects;
  bool marginal_effects_have_se = false;

  [[nodiscard]] Eigen::Index base_count() const {
    return static_cast<Eigen::Index>(base_parameter_count(spec.family));
  }
  [[nodiscard]] Eigen::VectorXd standard_errors() const {
    return covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
};

/// Inverse of a negative-log-likelihood Hessian, falling back to a
/// pseudo-inverse (non-positive eigenvalues dropped) when it is not
/// positive definite.
inline CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian) {
  CovarianceResult out;
  const Eigen::Index n = hessian.rows();
  if (n == 0) {
    out.available = true;
    return out;
  }
  if (!hessian.allFinite()) {
    out.matrix = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    out.pseudo_inverse = true;
    return out;
  }
  const Eigen::MatrixXd sym = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  const double tol = top * 1e-12 * static_cast<double>(n);
  Eigen::VectorXd inv(n);
  bool definite = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev[i] > tol) {
      inv[i] = 1.0 / ev[i];
    } else {
      inv[i] = 0.0;
      definite = false;
    }
  }
  out.matrix = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose());
  out.available = definite;
  out.pseudo_inverse = !definite;
  return out;
}

/// Covariance of theta at a point: inverse negative Hessian of the
/// log-likelihood by central differences.
inline CovarianceResult covariance(const ModelSpec& spec, const Eigen::VectorXd& theta,
                                   const RegressionDesign& data) {
  data.validate();
  const LikelihoodEvaluator ll(spec, data.covariates, data.counts, data.censor_at);
  const Objective f = [&](const Eigen::VectorXd& x) { return -ll(x); };
  return covariance_from_hessian(numeric_hessian(f, theta));
}

namespace detail {

/// dE(N | eta) / d eta.
inline double mean_slope(const ModelSpec& spec, const Eigen::VectorXd& base, double eta) {
  if (mean_is_log_linear(spec.family)) return mean_link(spec, base, eta).mean();
  constexpr double h = 1e-4;
  return (mean_link(spec, base, eta + h).mean() - mean_link(spec, base, eta - h).mean()) /
         (2.0 * h);
}

inline Eigen::VectorXd effects_vector(const ModelSpec& spec, const Eigen::VectorXd& theta,
                                      const Eigen::VectorXd& x) {
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(spec.family));
  const Eigen::VectorXd b = theta.tail(theta.size() - k);
  const double slope = mean_slope(spec, theta.head(k), b.dot(x));
  return b * slope;
}

}  // namespace detail

/// Marginal effects dE(N | x)/dx_j at covariate row x, with delta-method
/// standard errors when a covariance of theta is supplied.
inline std::vector<MarginalEffect> marginal_effects(const ModelSpec& spec,
                                                    const Eigen::VectorXd& theta,
                                                    const std::vector<std::string>& names,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::MatrixXd* theta_covariance) {
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(spec.family));
  const Eigen::Index p = theta.size() - k;
  if (x.size() != p) throw DomainError("marginal_effects: covariate row has the wrong length");
  const Eigen::VectorXd effects = detail::effects_vector(spec, theta, x);
  std::vector<MarginalEffect> out(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    auto& e = out[static_cast<std::size_t>(j)];
    e.name = static_cast<std::size_t>(k + j) < names.size() ? names[static_cast<std::size_t>(k + j)]
                                                            : "x" + std::to_string(j + 1);
    e.effect = effects[j];
  }
  if (theta_covariance == nullptr) return out;
  Eigen::MatrixXd jac(p, theta.size());
  Eigen::VectorXd tp = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::fabs(theta[i]));
    tp[i] = theta[i] + h;
    const Eigen::VectorXd up = detail::effects_vector(spec, tp, x);
    tp[i] = theta[i] - h;
    const Eigen::VectorXd down = detail::effects_vector(spec, tp, x);
    tp[i] = theta[i];
    jac.col(i) = (up - down) / (2.0 * h);
  }
  const Eigen::MatrixXd cov = jac * (*theta_covariance) * jac.transpose();
  for (Eigen::Index j = 0; j < p; ++j) {
    out[static_cast<std::size_t>(j)].se = std::sqrt(std::max(0.0, cov(j, j)));
  }
  return out;
}

inline std::vector<MarginalEffect> marginal_effects(const FitResult& fit, const Eigen::VectorXd& x) {
  return marginal_effects(fit.spec, fit.theta, fit.parameter_names, x,
                          fit.covariance_available ? &fit.covariance : nullptr);
}

namespace detail {

/// Centred and scaled covariates; theta = to_theta * phi, where phi holds
/// the base parameters and coefficients of the non-constant columns.
struct Standardization {
  Eigen::MatrixXd z;
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
  std::vector<Eigen::Index> free_columns;
  Eigen::MatrixXd to_theta;

  [[nodiscard]] Eigen::VectorXd phi_from_theta(const Eigen::VectorXd& theta, Family f) const {
    const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(f));
    Eigen::VectorXd phi(k + static_cast<Eigen::Index>(free_columns.size()));
    const Eigen::VectorXd b = theta.tail(theta.size() - k);
    const double shift = b.dot(center);
    for (Eigen::Index i = 0; i < k; ++i) {
      phi[i] = theta[i] + link_sign(f, static_cast<std::size_t>(i)) * shift;
    }
    for (std::size_t jj = 0; jj < free_columns.size(); ++jj) {
      const Eigen::Index j = free_columns[jj];
      phi[k + static_cast<Eigen::Index>(jj)] = b[j] * scale[j];
    }
    return phi;
  }
};

inline Standardization standardize(const Eigen::MatrixXd& x, Family f) {
  Standardization s;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(f));
  s.center = Eigen::VectorXd::Zero(p);
  s.scale = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double m = x.col(j).mean();
    const double sd =
        n > 1 ? std::sqrt((x.col(j).array() - m).square().sum() / static_cast<double>(n - 1)) : 0.0;
    if (sd > 1e-12 * std::max(1.0, std::fabs(m))) {
      s.center[j] = m;
      s.scale[j] = sd;
      s.free_columns.push_back(j);
    }
  }
  const Eigen::Index q = static_cast<Eigen::Index>(s.free_columns.size());
  s.z.resize(n, q);
  s.to_theta = Eigen::MatrixXd::Zero(k + p, k + q);
  for (Eigen::Index i = 0; i < k; ++i) s.to_theta(i, i) = 1.0;
  for (Eigen::Index jj = 0; jj < q; ++jj) {
    const Eigen::Index j = s.free_columns[static_cast<std::size_t>(jj)];
    s.z.col(jj) = (x.col(j).array() - s.center[j]) / s.scale[j];
    s.to_theta(k + j, k + jj) = 1.0 / s.scale[j];
    for (Eigen::Index i = 0; i < k; ++i) {
      s.to_theta(i, k + jj) = -link_sign(f, static_cast<std::size_t>(i)) * s.center[j] / s.scale[j];
    }
  }
  return s;
}

struct SampleMoments {
  double mean = 0.0;
  double dispersion = 1.0;  ///< variance / mean
};

inline SampleMoments sample_moments(const std::vector<int>& counts) {
  double sum = 0.0;
  double sum2 = 0.0;
  for (int c : counts) {
    sum += c;
    sum2 += static_cast<double>(c) * c;
  }
  const double n = static_cast<double>(counts.size());
  SampleMoments m;
  m.mean = std::max(sum / n, 0.05);
  const double var = n > 1 ? (sum2 - sum * sum / n) / (n - 1.0) : m.mean;
  m.dispersion = std::clamp(var / m.mean, 0.05, 20.0);
  return m;
}

inline Eigen::VectorXd with_coefficients(const Eigen::VectorXd& base, const Eigen::VectorXd& b) {
  Eigen::VectorXd phi(base.size() + b.size());
  phi << base, b;
  return phi;
}

/// Base-parameter starting points (transformed scale) for a target rate
/// rho = E(N)/t and dispersion index d.
inline std::vector<Eigen::VectorXd> base_starts(Family f, double rho, double d) {
  const double b0 = std::clamp(1.0 / d, 0.2, 5.0);
  std::vector<Eigen::VectorXd> out;
  auto add = [&](std::initializer_list<double> natural) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(natural.size()));
    Eigen::Index i = 0;
    for (double x : natural) v[i++] = x;
    out.push_back(base_from_natural(f, v));
  };
  auto beta_mix = [&](double beta1, double beta2, double w) {
    add({rho / (w / beta1 + (1.0 - w) / beta2), beta1, beta2, w});
  };
  auto alpha_mix = [&](double ratio, double beta, double w) {
    const double a2 = rho * beta / (w * ratio + 1.0 - w);
    add({ratio * a2, a2, beta, w});
  };
  switch (f) {
    case Family::Poisson: add({rho}); break;
    case Family::RPGamma:
    case Family::ERPGamma:
      add({b0 * rho, b0});
      add({rho, 1.0});
      add({1.5 * b0 * rho, 1.5 * b0});
      break;
    case Family::RPGammaHurdle:
      add({b0 * rho, b0, 0.0});
      add({rho, 1.0, 0.0});
      break;
    case Family::ERPGammaBetaMixture:
      beta_mix(2.0 * b0, 0.5 * b0, 0.5);
      beta_mix(1.5, 1.0 / 1.5, 0.5);
      beta_mix(1.7 * b0, 0.8 * b0, 0.85);
      beta_mix(0.8 * b0, 3.0 * b0, 0.85);
      break;
    case Family::ERPGammaAlphaMixture:
      alpha_mix(3.0, b0, 0.5);
      alpha_mix(2.0, 1.0, 0.5);
      alpha_mix(2.7, 1.5 * b0, 0.1);
      alpha_mix(0.4, 1.5 * b0, 0.9);
      break;
    case Family::RPIG:
    case Family::ERPIG:
      add({1.0 / rho, 1.0 / (rho * d)});
      add({1.0 / rho, 1.0 / rho});
      add({1.0 / rho, 3.0 / (rho * d)});
      break;
  }
  return out;
}

inline bool is_mixture(Family f) {
  return f == Family::ERPGammaBetaMixture || f == Family::ERPGammaAlphaMixture;
}

/// Orders mixture components by descending weight.
inline void order_mixture(Family f, Eigen::VectorXd& phi) {
  if (!is_mixture(f) || phi[3] >= 0.0) return;
  if (f == Family::ERPGammaBetaMixture) std::swap(phi[1], phi[2]);
  if (f == Family::ERPGammaAlphaMixture) std::swap(phi[0], phi[1]);
  phi[3] = -phi[3];
}

}  // namespace detail

inline FitResult fit(const ModelSpec& spec, const RegressionDesign& data,
                     const FitOptions& options = {});

namespace detail {

/// Extra starting points taken from fits of nested or related families.
inline std::vector<Eigen::VectorXd> nested_starts(const ModelSpec& spec, const RegressionDesign& data,
                                                  const Standardization& st,
                                                  const OptimizerOptions& opt) {
  std::vector<Eigen::VectorXd> out;
  FitOptions sub;
  sub.optimizer = opt;
  sub.compute_covariance = false;
  sub.compute_marginal_effects = false;
  auto sub_fit = [&](Family f) {
    ModelSpec s = spec;
    s.family = f;
    const FitResult r = fit(s, data, sub);
    return std::pair{r, st.phi_from_theta(r.theta, f)};
  };
  const Eigen::Index q = static_cast<Eigen::Index>(st.free_columns.size());
  switch (spec.family) {
    case Family::RPGammaHurdle: {
      const auto [r, phi] = sub_fit(Family::RPGamma);
      Eigen::VectorXd base(3);
      base << phi[0], phi[1], phi[1];
      out.push_back(with_coefficients(base, phi.tail(q)));
      for (double factor : {0.7, 1.5}) {
        base[2] = phi[1] + std::log(factor);
        out.push_back(with_coefficients(base, phi.tail(q)));
      }
      break;
    }
    case Family::ERPGammaBetaMixture:
    case Family::ERPGammaAlphaMixture: {
      const auto [r, phi] = sub_fit(Family::ERPGamma);
      const double la = phi[0];
      const double lb = phi[1];
      for (const auto& [spread, w] : {std::pair{0.5, 2.0}, std::pair{1.0, 0.0}}) {
        Eigen::VectorXd base(4);
        if (spec.family == Family::ERPGammaBetaMixture) {
          base << la, lb + spread, lb - spread, w;
        } else {
          base << la + spread, la - spread, lb, w;
        }
        out.push_back(with_coefficients(base, phi.tail(q)));
      }
      break;
    }
    default: break;
  }
  return out;
}

}  // namespace detail

/// Maximum-likelihood fit. Multi-start for every family other than
/// Poisson; the hurdle and mixture families also start from the fits of
/// the families they extend.
inline FitResult fit(const ModelSpec& spec, const RegressionDesign& data, const FitOptions& options) {
  spec.validate();
  data.validate();
  const Family f = spec.family;
  const Eigen::Index k = static_cast<Eigen::Index>(base_parameter_count(f));
  const Eigen::Index p = data.columns();
  const detail::Standardization st = detail::standardize(
      p > 0 ? data.covariates : Eigen::MatrixXd(static_cast<Eigen::Index>(data.rows()), 0), f);
  const Eigen::Index q = static_cast<Eigen::Index>(st.free_columns.size());

  const LikelihoodEvaluator ll(spec, st.z, data.counts, data.censor_at);
  const Objective objective = [&](const Eigen::VectorXd& phi) { return -ll(phi); };

  FitResult result;
  result.spec = spec;
  result.parameter_names = parameter_names(spec, data);
  result.observations = data.rows();

  std::vector<Eigen::VectorXd> starts;
  if (options.start) {
    if (options.start->size() != k + p) throw DomainError("fit: start vector has the wrong length");
    starts.push_back(st.phi_from_theta(*options.start, f));
  } else {
    const detail::SampleMoments mom = detail::sample_moments(data.counts);
    // Poisson regression supplies the coefficient seeds and the rate.
    ModelSpec poisson = spec;
    poisson.family = Family::Poisson;
    const LikelihoodEvaluator pll(poisson, st.z, data.counts, data.censor_at);
    Eigen::VectorXd pstart = Eigen::VectorXd::Zero(1 + q);
    pstart[0] = std::log(mom.mean / spec.t);
    const OptimResult pfit =
        bfgs([&](const Eigen::VectorXd& x) { return -pll(x); }, pstart, options.optimizer);
    const double rho = std::exp(pfit.x[0]);
    const Eigen::VectorXd b_seed = pfit.x.tail(q);
    if (f == Family::Poisson) {
      starts.push_back(pfit.x);
    } else {
      for (const auto& base : detail::base_starts(f, rho, mom.dispersion)) {
        starts.push_back(detail::with_coefficients(base, b_seed));
      }
      // The Poisson fit itself is a point of the gamma families (beta = 1).
      if (f == Family::RPGamma || f == Family::ERPGamma) {
        Eigen::VectorXd base(2);
        base << pfit.x[0], 0.0;
        starts.push_back(detail::with_coefficients(base, b_seed));
      }
      for (auto& s : detail::nested_starts(spec, data, st, options.optimizer)) {
        starts.push_back(std::move(s));
      }
    }
  }

  OptimResult best;
  for (const auto& start : starts) {
    OptimResult r;
    if (options.start || f == Family::Poisson) {
      r = bfgs(objective, start, options.optimizer);
    } else if (q > 0) {
      // Simplex on the base parameters with coefficients held at their
      // seeds, then a joint quasi-Newton polish.
      const Eigen::VectorXd b = start.tail(q);
      const Objective base_only = [&](const Eigen::VectorXd& base) {
        return objective(detail::with_coefficients(base, b));
      };
      const OptimResult coarse = nelder_mead(base_only, start.head(k), options.optimizer);
      r = bfgs(objective, detail::with_coefficients(coarse.x, b), options.optimizer);
      r.iterations += coarse.iterations;
      r.evaluations += coarse.evaluations;
    } else {
      r = minimize(objective, start, options.optimizer);
    }
    result.iterations += r.iterations;
    result.evaluations += r.evaluations;
    ++result.starts;
    if (r.value < best.value) best = r;
  }
  if (!std::isfinite(best.value)) {
    throw NumericalFailure("fit: likelihood is not finite at any starting point");
  }

  Eigen::VectorXd phi = best.x;
  detail::order_mixture(f, phi);
  bool underflow = false;
  result.minus_loglik = -ll(phi, &underflow);
  result.pmf_underflow = underflow;
  result.converged = best.converged;
  result.theta = st.to_theta * phi;

  const Eigen::Index n_theta = k + p;
  result.covariance = Eigen::MatrixXd::Constant(n_theta, n_theta, std::numeric_limits<double>::quiet_NaN());
  if (options.compute_covariance) {
    const CovarianceResult cov = covariance_from_hessian(numeric_hessian(objective, phi));
    result.covariance = st.to_theta * cov.matrix * st.to_theta.transpose();
    result.covariance_available = cov.available;
    result.covariance_pseudo_inverse = cov.pseudo_inverse;
    // Coefficients of constant columns are absorbed by the intercept.
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::find(st.free_columns.begin(), st.free_columns.end(), j) == st.free_columns.end()) {
        result.covariance(k + j, k + j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  const Eigen::VectorXd base = result.theta.head(k);
  const Eigen::VectorXd natural = natural_parameters(f, base);
  const Eigen::MatrixXd jac = natural_jacobian(f, base);
  const Eigen::MatrixXd natural_cov = jac * result.covariance.topLeftCorner(k, k) * jac.transpose();
  const std::vector<std::string> natural_names = natural_parameter_names(f);
  for (Eigen::Index i = 0; i < k; ++i) {
    result.natural.push_back({natural_names[static_cast<std::size_t>(i)], natural[i],
                              std::sqrt(natural_cov(i, i))});
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    result.coefficients.push_back(
        {data.column_name(j), result.theta[k + j], std::sqrt(result.covariance(k + j, k + j))});
  }

  result.covariate_means = p > 0 ? Eigen::VectorXd(data.covariates.colwise().mean().transpose())
                                 : Eigen::VectorXd();
  const Eigen::VectorXd b = result.theta.tail(p);
  result.mean_at_means = mean_link(spec, base, p > 0 ? b.dot(result.covariate_means) : 0.0).mean();
  result.eta0 = mean_link(spec, base, 0.0).mean();

  if (options.compute_marginal_effects && p > 0) {
    const Eigen::VectorXd at = options.effects_at ? *options.effects_at : result.covariate_means;
    result.marginal_effects = marginal_effects(
        spec, result.theta, result.parameter_names, at,
        result.covariance_available ? &result.covariance : nullptr);
    result.marginal_effects_have_se = result.covariance_available;
  }
  return result;
}

}  // namespace renewcount
