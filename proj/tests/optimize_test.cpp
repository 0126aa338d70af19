#include "renewcount/optimize.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "renewcount/estimation.hpp"

namespace renewcount {
namespace {

double rosenbrock(const Eigen::VectorXd& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

TEST(Optimizer, RosenbrockFromStandardStart) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const OptimResult r = minimize(rosenbrock, x0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  EXPECT_LT(r.value, 1e-10);
}

TEST(Optimizer, NelderMeadAloneGetsClose) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const OptimResult r = nelder_mead(rosenbrock, x0);
  EXPECT_NEAR(r.x[0], 1.0, 1e-2);
  EXPECT_NEAR(r.x[1], 1.0, 2e-2);
}

TEST(Optimizer, RespectsInfeasibleRegion) {
  // x - log x has its minimum at 1 and is undefined for x <= 0.
  const Objective f = [](const Eigen::VectorXd& x) {
    if (x[0] <= 0.0) return std::numeric_limits<double>::infinity();
    return x[0] - std::log(x[0]);
  };
  Eigen::VectorXd x0(1);
  x0 << 0.05;
  const OptimResult r = minimize(f, x0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
}

TEST(Optimizer, NonFiniteStartIsReported) {
  const Objective f = [](const Eigen::VectorXd&) { return std::nan(""); };
  const OptimResult r = bfgs(f, Eigen::VectorXd::Zero(3));
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(std::isfinite(r.value));
}

class QuadraticTest : public ::testing::Test {
 protected:
  void SetUp() override {
    h_.resize(3, 3);
    h_ << 4.0, 1.0, 0.5,  //
        1.0, 3.0, -0.2,   //
        0.5, -0.2, 2.0;
    c_.resize(3);
    c_ << 0.3, -1.0, 2.5;
  }
  double operator()(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd d = x - c_;
    return 0.5 * d.dot(h_ * d) + 7.0;
  }
  Eigen::MatrixXd h_;
  Eigen::VectorXd c_;
};

TEST_F(QuadraticTest, MinimumAndHessian) {
  const Objective f = [this](const Eigen::VectorXd& x) { return (*this)(x); };
  const OptimResult r = minimize(f, Eigen::VectorXd::Zero(3));
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - c_).cwiseAbs().maxCoeff(), 1e-6);
  const Eigen::MatrixXd hess = numeric_hessian(f, r.x);
  EXPECT_LT((hess - h_).cwiseAbs().maxCoeff(), 1e-5);
}

TEST_F(QuadraticTest, CovarianceIsExactInverse) {
  const Objective f = [this](const Eigen::VectorXd& x) { return (*this)(x); };
  const CovarianceResult cov = covariance_from_hessian(numeric_hessian(f, c_));
  EXPECT_TRUE(cov.available);
  EXPECT_FALSE(cov.pseudo_inverse);
  EXPECT_LT((cov.matrix - h_.inverse()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((cov.matrix - cov.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Covariance, SingularHessianFallsBackToPseudoInverse) {
  Eigen::MatrixXd h(2, 2);
  h << 1.0, 1.0, 1.0, 1.0;
  const CovarianceResult cov = covariance_from_hessian(h);
  EXPECT_FALSE(cov.available);
  EXPECT_TRUE(cov.pseudo_inverse);
  // Moore-Penrose inverse of [[1,1],[1,1]] is [[1,1],[1,1]] / 4.
  EXPECT_NEAR(cov.matrix(0, 0), 0.25, 1e-12);
  EXPECT_NEAR(cov.matrix(0, 1), 0.25, 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-15);
}

}  // namespace
}  // namespace renewcount
