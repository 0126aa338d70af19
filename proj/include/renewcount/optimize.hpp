#pragma once

// Unconstrained minimization for smooth objectives without analytic
// gradients: a Nelder-Mead simplex search to get near the optimum, then a
// BFGS polish with central-difference gradients. Objectives signal an
// infeasible point by returning +inf (or NaN).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace renewcount {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizerOptions {
  int max_simplex_iterations = 4000;
  int max_bfgs_iterations = 500;
  double simplex_initial_step = 0.3;
  double simplex_tolerance = 1e-7;  ///< spread of simplex values
  double step_tolerance = 1e-8;     ///< max |delta x| for convergence
  double value_tolerance = 1e-10;   ///< |delta f| for convergence
  double gradient_tolerance = 1e-5; ///< max |g| accepted as stationary
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

namespace detail {

class CountingObjective {
 public:
  explicit CountingObjective(const Objective& f) : f_(f) {}
  double operator()(const Eigen::VectorXd& x) {
    ++count_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  [[nodiscard]] int count() const { return count_; }

 private:
  const Objective& f_;
  int count_ = 0;
};

inline double gradient_step(double x) { return 1e-6 * std::max(1.0, std::fabs(x)); }

}  // namespace detail

/// Central-difference gradient; components whose stencil leaves the
/// feasible region fall back to one-sided differences.
inline Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x,
                                        double fx = std::numeric_limits<double>::quiet_NaN()) {
  if (std::isnan(fx)) fx = f(x);
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = detail::gradient_step(x[i]);
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g[i] = (fp - fx) / h;
    } else if (std::isfinite(fm)) {
      g[i] = (fx - fm) / h;
    } else {
      g[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return g;
}

/// Central-difference Hessian with per-coordinate step
/// max(1e-5, 1e-5 |x_i|).
inline Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = std::max(1e-5, 1e-5 * std::fabs(x[i]));
  const double f0 = f(x);
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h[i];
    const double fp = f(xp);
    xp[i] = x[i] - h[i];
    const double fm = f(xp);
    xp[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      auto eval = [&](double si, double sj) {
        xp[i] = x[i] + si * h[i];
        xp[j] = x[j] + sj * h[j];
        const double v = f(xp);
        xp[i] = x[i];
        xp[j] = x[j];
        return v;
      };
      const double v = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) /
                       (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

/// Nelder-Mead with standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, 1/2, 1/2).
inline OptimResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0,
                               const OptimizerOptions& opts = {}) {
  detail::CountingObjective f(objective);
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = f(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    simplex[i + 1][i] += opts.simplex_initial_step;
    values[i + 1] = f(simplex[i + 1]);
    if (!std::isfinite(values[i + 1])) {
      simplex[i + 1][i] = x0[i] - opts.simplex_initial_step;
      values[i + 1] = f(simplex[i + 1]);
    }
  }
  std::vector<std::size_t> order(n + 1);
  OptimResult result;
  int iter = 0;
  for (; iter < opts.max_simplex_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double spread_x = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
      spread_x = std::max(spread_x, (simplex[order[k]] - simplex[best]).cwiseAbs().maxCoeff());
    }
    const double spread_f = values[worst] - values[best];
    if (std::isfinite(spread_f) &&
        spread_f <= opts.simplex_tolerance * (1.0 + std::fabs(values[best])) &&
        spread_x <= 1e3 * opts.step_tolerance + 1e-4) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < order.size() - 1; ++k) centroid += simplex[order[k]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = f(simplex[k]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  result.iterations = iter;
  result.evaluations = f.count();
  return result;
}

/// BFGS on the inverse Hessian with central-difference gradients and a
/// backtracking Armijo line search.
inline OptimResult bfgs(const Objective& objective, const Eigen::VectorXd& x0,
                        const OptimizerOptions& opts = {}) {
  detail::CountingObjective f(objective);
  const Objective counted = [&](const Eigen::VectorXd& x) { return f(x); };
  const Eigen::Index n = x0.size();
  OptimResult result;
  Eigen::VectorXd x = x0;
  double fx = f(x);
  if (!std::isfinite(fx)) {
    result.x = x;
    result.value = fx;
    result.evaluations = f.count();
    return result;
  }
  Eigen::VectorXd g = numeric_gradient(counted, x, fx);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  int iter = 0;
  for (; iter < opts.max_bfgs_iterations; ++iter) {
    if (!g.allFinite()) break;
    if (g.cwiseAbs().maxCoeff() <= opts.gradient_tolerance) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd direction = -h_inv * g;
    if (direction.dot(g) >= 0.0) {
      h_inv.setIdentity();
      direction = -g;
    }
    // Keep trial steps within a sane range on the transformed scale.
    const double max_step = direction.cwiseAbs().maxCoeff();
    if (max_step > 2.0) direction *= 2.0 / max_step;

    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    const double slope = direction.dot(g);
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      x_new = x + step * direction;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (h_inv.isIdentity()) {
        // Steepest descent cannot improve: we are at the noise floor of the
        // finite-difference gradient.
        result.converged = g.cwiseAbs().maxCoeff() < 1e-3 * (1.0 + std::fabs(fx));
        break;
      }
      h_inv.setIdentity();
      continue;
    }
    const Eigen::VectorXd s = x_new - x;
    const double df = fx - f_new;
    const Eigen::VectorXd g_new = numeric_gradient(counted, x_new, f_new);
    const Eigen::VectorXd y = g_new - g;
    x = x_new;
    fx = f_new;
    g = g_new;
    if (s.cwiseAbs().maxCoeff() < opts.step_tolerance && df < opts.value_tolerance) {
      result.converged = true;
      ++iter;
      break;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
  }
  result.x = x;
  result.value = fx;
  result.iterations = iter;
  result.evaluations = f.count();
  return result;
}

/// Simplex search followed by a BFGS polish.
inline OptimResult minimize(const Objective& f, const Eigen::VectorXd& x0,
                            const OptimizerOptions& opts = {}) {
  const OptimResult coarse = nelder_mead(f, x0, opts);
  OptimResult fine = bfgs(f, coarse.x, opts);
  fine.iterations += coarse.iterations;
  fine.evaluations += coarse.evaluations;
  if (!(fine.value <= coarse.value)) {
    fine.x = coarse.x;
    fine.value = coarse.value;
    fine.converged = false;
  }
  return fine;
}

}  // namespace renewcount
