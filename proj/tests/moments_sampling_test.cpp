#include "renewcount/moments.hpp"
#include "renewcount/sampling.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace renewcount {
namespace {

template <class Draw>
std::map<std::int64_t, std::int64_t> histogram(std::int64_t draws, Draw&& draw) {
  std::map<std::int64_t, std::int64_t> h;
  for (std::int64_t i = 0; i < draws; ++i) ++h[draw()];
  return h;
}

TEST(Rng, DeterministicReplay) {
  RngStream a(12345);
  RngStream b(12345);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
  RngStream c(12345);
  RngStream d(12345);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(sample_gamma(0.7, 2.0, c), sample_gamma(0.7, 2.0, d));
    ASSERT_EQ(sample_ig(0.5, 1.5, c), sample_ig(0.5, 1.5, d));
  }
  EXPECT_NE(RngStream(1).next_u64(), RngStream(2).next_u64());
}

TEST(Rng, UniformMoments) {
  RngStream rng(7);
  std::vector<double> xs(1'000'000);
  for (double& x : xs) {
    x = rng.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  const auto m = oracle::moments(xs);
  EXPECT_NEAR(m.mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 1e6));
  EXPECT_NEAR(m.variance, 1.0 / 12.0, 1e-3);
}

TEST(SampleGamma, ExponentialAndGeneralMoments) {
  constexpr int kDraws = 1'000'000;
  for (const auto& [shape, rate] : std::vector<std::pair<double, double>>{
           {1.0, 2.5}, {0.25, 2.0}, {4.0, 32.0}, {1.95, 3.98}}) {
    RngStream rng(99);
    std::vector<double> xs(kDraws);
    for (double& x : xs) x = sample_gamma(shape, rate, rng);
    const auto m = oracle::moments(xs);
    const double mean = shape / rate;
    const double var = shape / (rate * rate);
    EXPECT_NEAR(m.mean, mean, 4.0 * std::sqrt(var / kDraws)) << shape << "," << rate;
    // SE of the sample variance: sqrt((mu4 - var^2)/N), mu4 = 3 var^2 (1 + 2/shape).
    const double mu4 = 3.0 * var * var * (1.0 + 2.0 / shape);
    EXPECT_NEAR(m.variance, var, 4.0 * std::sqrt((mu4 - var * var) / kDraws)) << shape;
  }
}

TEST(SampleIg, Moments) {
  constexpr int kDraws = 1'000'000;
  for (const auto& [mu, lambda] :
       std::vector<std::pair<double, double>>{{1.0, 1.0}, {0.5, 4.0}, {0.125, 0.25}}) {
    RngStream rng(2024);
    std::vector<double> xs(kDraws);
    for (double& x : xs) x = sample_ig(mu, lambda, rng);
    const auto m = oracle::moments(xs);
    const double var = mu * mu * mu / lambda;
    EXPECT_NEAR(m.mean, mu, 4.0 * std::sqrt(var / kDraws));
    // IG fourth central moment: 15 mu^7/lambda^3 + 3 mu^6/lambda^2.
    const double mu4 = 15.0 * std::pow(mu, 7) / std::pow(lambda, 3) +
                       3.0 * std::pow(mu, 6) / (lambda * lambda);
    EXPECT_NEAR(m.variance, var, 4.0 * std::sqrt((mu4 - var * var) / kDraws)) << mu << "," << lambda;
  }
}

TEST(SampleIg, AdditiveProperty) {
  // X1 + X2 ~ IG(2 mu, 4 lambda): compare the empirical cdf with ig_sum_cdf.
  const IGRenewalParams p{0.5, 1.2, 1.0};
  RngStream rng(5);
  std::vector<double> sums(1'000'000);
  for (double& s : sums) s = sample_ig(p.mu, p.lambda, rng) + sample_ig(p.mu, p.lambda, rng);
  std::vector<double> grid;
  for (double x = 0.02; x < 5.0; x += 0.02) grid.push_back(x);
  const double d = oracle::kolmogorov_distance_on_grid(sums, grid,
                                                       [&](double x) { return ig_sum_cdf(2, x, p); });
  EXPECT_LT(d, 0.002);
  EXPECT_NEAR(oracle::moments(sums).mean, 2.0 * p.mu,
              4.0 * std::sqrt(2.0 * std::pow(p.mu, 3) / p.lambda / 1e6));
}

TEST(SampleErp, FirstArrivalIsIntegratedSurvival) {
  // cdf of the first arrival: mu^{-1} int_0^x S(w) dw, by quadrature of the
  // gamma density.
  const GammaRenewalParams p{2.0, 0.6, 1.0};
  const double mu = p.mean_interarrival();
  RngStream rng(31);
  std::vector<double> xs(1'000'000);
  for (double& x : xs) x = sample_erp_first_arrival(p, rng);
  std::vector<double> grid;
  for (double x = 0.01; x < 2.5; x += 0.05) grid.push_back(x);
  auto cdf = [&](double x) {
    const double integral_f = oracle::integrate(
        [&](double w) { return (x - w) * oracle::gamma_pdf(w, p.beta, p.alpha); }, 0.0, x);
    return (x - integral_f) / mu;
  };
  EXPECT_LT(oracle::kolmogorov_distance_on_grid(xs, grid, cdf), 0.002);
}

TEST(SampleCounts, PoissonCaseRpAndErpAgree) {
  const GammaRenewalParams p{3.0, 1.0, 1.0};
  constexpr std::int64_t kDraws = 1'000'000;
  RngStream rng_rp(1);
  RngStream rng_erp(2);
  const auto rp = histogram(kDraws, [&] { return sample_rp_count(p, rng_rp); });
  const auto erp = histogram(kDraws, [&] { return sample_erp_count(p, rng_erp); });
  auto poisson = [](int n) { return oracle::poisson_pmf(n, 3.0); };
  EXPECT_LT(oracle::max_binomial_z(rp, kDraws, poisson), 4.0);
  EXPECT_LT(oracle::max_binomial_z(erp, kDraws, poisson), 4.0);

  // Pearson chi-square between the two samples (cells with >= 10 in both).
  double chi2 = 0.0;
  int cells = 0;
  for (const auto& [n, a] : rp) {
    const auto it = erp.find(n);
    if (it == erp.end() || a < 10 || it->second < 10) continue;
    const double b = static_cast<double>(it->second);
    chi2 += (a - b) * (a - b) / (a + b);
    ++cells;
  }
  // p > 0.001 for df = cells - 1 (about 12): critical value below 35.
  EXPECT_LT(chi2, 35.0) << "cells=" << cells;
}

TEST(SampleCounts, ErpGammaMatchesClosedFormAtNTwo) {
  const GammaRenewalParams p{1.0, 2.0, 1.0};
  constexpr std::int64_t kDraws = 10'000'000;
  RngStream rng(77);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < kDraws; ++i) hits += sample_erp_count(p, rng) == 2 ? 1 : 0;
  const double q2 = erp_gamma_pmf(2, p);
  const double se = std::sqrt(kDraws * q2 * (1.0 - q2));
  EXPECT_LT(std::fabs(static_cast<double>(hits) - kDraws * q2), 4.0 * se);
}

TEST(SampleCounts, ErpGammaMeanOverdispersedCase) {
  const GammaRenewalParams p{2.0, 0.25, 1.0};
  RngStream rng(8);
  std::vector<double> xs(1'000'000);
  for (double& x : xs) x = static_cast<double>(sample_erp_count(p, rng));
  const auto m = oracle::moments(xs);
  EXPECT_NEAR(m.mean, 8.0, 4.0 * std::sqrt(m.variance / 1e6));
  // Exact variance within 4 SE of the sample variance (SE via sample mu4).
  double mu4 = 0.0;
  for (double x : xs) mu4 += std::pow(x - m.mean, 4);
  mu4 /= 1e6;
  const double exact = erp_variance_exact(p);
  EXPECT_NEAR(m.variance, exact, 4.0 * std::sqrt((mu4 - m.variance * m.variance) / 1e6));
}

TEST(SampleCounts, MatchClosedFormPmfs) {
  constexpr std::int64_t kDraws = 1'000'000;
  const GammaRenewalParams g{2.74, 1.15, 1.0};
  const IGRenewalParams ig{0.4, 0.8, 1.0};
  const HurdleSpec h{3, 0.66};
  const GammaRenewalParams hp{2.38, 0.87, 1.0};
  const GammaMixtureSpec mix{{3.98, 1.95, 1.0}, {3.98, 0.93, 1.0}, 0.85};
  RngStream rng(4242);

  const auto rp_g = histogram(kDraws, [&] { return sample_rp_count(g, rng); });
  EXPECT_LT(oracle::max_binomial_z(rp_g, kDraws, [&](int n) { return rp_gamma_pmf(n, g); }), 4.0);
  const auto erp_g = histogram(kDraws, [&] { return sample_erp_count(g, rng); });
  EXPECT_LT(oracle::max_binomial_z(erp_g, kDraws, [&](int n) { return erp_gamma_pmf(n, g); }), 4.0);
  const auto rp_ig = histogram(kDraws, [&] { return sample_rp_count(ig, rng); });
  EXPECT_LT(oracle::max_binomial_z(rp_ig, kDraws, [&](int n) { return rp_ig_pmf(n, ig); }), 4.0);
  const auto erp_ig = histogram(kDraws, [&] { return sample_erp_count(ig, rng); });
  EXPECT_LT(oracle::max_binomial_z(erp_ig, kDraws, [&](int n) { return erp_ig_pmf(n, ig); }), 4.0);
  const auto hurdle = histogram(kDraws, [&] { return sample_rp_hurdle_count(hp, h, rng); });
  EXPECT_LT(oracle::max_binomial_z(hurdle, kDraws,
                                   [&](int n) { return rp_gamma_hurdle_pmf(n, hp, h); }),
            4.0);
  const auto mixed = histogram(kDraws, [&] { return sample_erp_mixture_count(mix, rng); });
  EXPECT_LT(oracle::max_binomial_z(mixed, kDraws,
                                   [&](int n) { return erp_gamma_mixture_pmf(n, mix); }),
            4.0);
}

TEST(Moments, ErpMeanExamples) {
  EXPECT_DOUBLE_EQ(erp_mean(GammaRenewalParams{2.0, 0.25, 1.0}), 8.0);
  EXPECT_DOUBLE_EQ(erp_mean(GammaRenewalParams{32.0, 4.0, 1.0}), 8.0);
  EXPECT_DOUBLE_EQ(erp_mean(IGRenewalParams{0.5, 1.0, 1.0}), 2.0);
}

TEST(Moments, ExactVarianceMatchesTable) {
  for (double a : {0.25, 2.0, 32.0}) {
    for (double b : {0.25, 1.0, 4.0}) {
      const GammaRenewalParams p{a, b, 1.0};
      const double v = erp_variance_exact(p);
      EXPECT_NEAR(v, erp_gamma_table(p).variance(), 1e-8 * v) << a << "," << b;
    }
  }
  for (double mu : {0.125, 0.5, 1.0}) {
    for (double lambda : {0.25, 1.0, 4.0}) {
      const IGRenewalParams p{mu, lambda, 1.0};
      const double v = erp_variance_exact(p);
      EXPECT_NEAR(v, erp_ig_table(p).variance(), 1e-8 * v) << mu << "," << lambda;
    }
  }
}

TEST(Moments, PoissonVarianceEqualsMean) {
  for (double a : {0.5, 2.38, 8.0, 200.0}) {
    const GammaRenewalParams p{a, 1.0, 1.0};
    EXPECT_NEAR(erp_variance_exact(p), a, 1e-8);
    EXPECT_EQ(erp_gamma_variance_asymptotic(p), a);
  }
}

TEST(Moments, DispersionOfFigureParameters) {
  const GammaRenewalParams over{2.0, 0.25, 1.0};
  const GammaRenewalParams under{32.0, 4.0, 1.0};
  EXPECT_GT(erp_variance_exact(over), 8.0);
  EXPECT_LT(erp_variance_exact(under), 8.0);
  EXPECT_EQ(classify_dispersion(8.0, erp_variance_exact(over)), Dispersion::Over);
  EXPECT_EQ(classify_dispersion(8.0, erp_variance_exact(under)), Dispersion::Under);
}

TEST(Moments, GammaAsymptoticVariance) {
  const GammaRenewalParams big{200.0, 2.0, 1.0};
  EXPECT_LT(std::fabs(erp_gamma_variance_asymptotic(big) - erp_variance_exact(big)), 0.02);
  const GammaRenewalParams fig2{32.0, 4.0, 1.0};
  EXPECT_LT(std::fabs(erp_gamma_variance_asymptotic(fig2) - erp_variance_exact(fig2)), 0.05);
}

TEST(Moments, IgAsymptoticVariance) {
  for (const auto& p : {IGRenewalParams{0.02, 0.05, 1.0}, IGRenewalParams{0.01, 0.02, 1.0},
                        IGRenewalParams{0.02, 0.02, 1.0}}) {
    EXPECT_LT(std::fabs(erp_ig_variance_asymptotic(p) - erp_variance_exact(p)), 0.02)
        << p.mu << "," << p.lambda;
  }
  // lambda = mu: the constant 1/6 - 1/2 is negative.
  const IGRenewalParams eq{0.1, 0.1, 1.0};
  EXPECT_NEAR(erp_ig_variance_asymptotic(eq) - eq.t / eq.lambda, 1.0 / 6.0 - 0.5, 1e-15);
}

TEST(Moments, IgOverdispersionCriterion) {
  // Large t: variance > mean iff lambda < mu.
  for (double lambda : {0.01, 0.03}) {
    const IGRenewalParams p{0.02, lambda, 1.0};
    const double mean = erp_mean(p);
    const double var = erp_variance_exact(p);
    EXPECT_EQ(var > mean, lambda < p.mu) << lambda;
  }
}

TEST(Moments, SeriesCapIsReported) {
  const GammaRenewalParams p{8.0, 0.25, 1.0};
  try {
    (void)erp_variance_exact(p, 5);
    FAIL() << "expected SeriesNotConverged";
  } catch (const SeriesNotConverged& e) {
    EXPECT_TRUE(std::isfinite(e.partial_sum()));
  }
}

}  // namespace
}  // namespace renewcount
