#include "renewcount/gamma_renewal.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace renewcount {
namespace {

const std::vector<double> kAlphaGrid{0.25, 1.0, 2.0, 8.0, 32.0};
const std::vector<double> kBetaGrid{0.25, 1.0, 4.0};

GammaRenewalParams params(double alpha, double beta, double t = 1.0) {
  return GammaRenewalParams{alpha, beta, t};
}

TEST(GammaSumCdf, Examples) {
  EXPECT_NEAR(gamma_sum_cdf(1, 1.0, params(1, 1)), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gamma_sum_cdf(1, 1.0, params(1, 1)), 0.6321205588, 1e-10);
  EXPECT_NEAR(gamma_sum_cdf(2, 1.0, params(1, 1)), 1.0 - 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gamma_sum_cdf(2, 1.0, params(1, 1)), 0.2642411177, 1e-10);
  EXPECT_EQ(gamma_sum_cdf(3, 0.0, params(2.7, 0.4)), 0.0);
  EXPECT_THROW(gamma_sum_cdf(0, 1.0, params(1, 1)), DomainError);
  EXPECT_THROW(gamma_sum_cdf(1, -1.0, params(1, 1)), DomainError);
}

TEST(Params, Validation) {
  EXPECT_THROW(rp_gamma_pmf(0, params(0.0, 1.0)), DomainError);
  EXPECT_THROW(erp_gamma_pmf(0, params(1.0, -1.0)), DomainError);
  EXPECT_THROW(erp_gamma_pmf(0, params(1.0, 1.0, 0.0)), DomainError);
  EXPECT_THROW(erp_gamma_pmf(0, params(NAN, 1.0)), DomainError);
  EXPECT_THROW(erp_gamma_pmf(-1, params(1.0, 1.0)), DomainError);
}

TEST(IntegralI, Examples) {
  EXPECT_NEAR(integral_I(1, params(1, 1)), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(integral_I(1, params(1, 1)), 0.3678794412, 1e-10);
  EXPECT_NEAR(integral_I(1, params(2, 0.25)), oracle::gamma_integral_I(1, 2, 0.25, 1), 1e-9);
  EXPECT_LT(integral_I(200, params(1, 1)), 1e-12);
  EXPECT_GE(integral_I(200, params(1, 1)), 0.0);
}

TEST(IntegralI, MatchesQuadratureOverGrid) {
  for (double a : kAlphaGrid) {
    for (double b : kBetaGrid) {
      for (int n : {1, 2, 5, 20}) {
        const double got = integral_I(n, params(a, b));
        const double ref = oracle::gamma_integral_I(n, a, b, 1.0);
        EXPECT_NEAR(got, ref, 1e-8) << "n=" << n << " alpha=" << a << " beta=" << b;
        EXPECT_GE(got, 0.0);
        EXPECT_LE(got, 1.0);
      }
    }
  }
}

TEST(IntegralI, ComplementIsShiftedIntegral) {
  const auto p = params(8.0, 0.7, 1.3);
  for (int n = 1; n < 40; ++n) {
    const auto pair = integral_I_pair(n, p);
    EXPECT_NEAR(pair.integral - pair.complement, p.t - n * p.beta / p.alpha, 1e-12);
  }
}

TEST(RpGammaPmf, Examples) {
  EXPECT_NEAR(rp_gamma_pmf(0, params(2.38, 1)), std::exp(-2.38), 1e-15);
  EXPECT_NEAR(rp_gamma_pmf(0, params(2.38, 1)), 0.0925506, 1e-7);
  EXPECT_NEAR(rp_gamma_pmf(0, params(1, 2)), 2.0 * std::exp(-1.0), 1e-15);
  double total = 0.0;
  const auto p = params(2.86, 1.16);
  for (int n = 0; n <= 200; ++n) total += rp_gamma_pmf(n, p);
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(ErpGammaPmf, Examples) {
  EXPECT_NEAR(erp_gamma_pmf(0, params(3, 1)), std::exp(-3.0), 1e-15);
  EXPECT_NEAR(erp_gamma_pmf(0, params(3, 1)), 0.0497870684, 1e-10);
  const auto table = erp_gamma_table(params(2, 0.25));
  EXPECT_NEAR(table.mean(), 8.0, 1e-6);
}

TEST(ErpGammaPmf, AgreesWithLiteralFormulas) {
  // Q_0 = 1 - t/mu + I_1/mu, Q_1 = t/mu + (I_2 - 2 I_1)/mu,
  // Q_n = (I_{n-1} - 2 I_n + I_{n+1})/mu, at moderate parameters where the
  // literal forms do not cancel badly.
  for (const auto& p : {params(2.74, 1.15), params(1.3, 0.6, 2.0), params(5.0, 3.0)}) {
    const double mu = p.mean_interarrival();
    auto I = [&](int n) { return integral_I(n, p); };
    EXPECT_NEAR(erp_gamma_pmf(0, p), 1.0 - p.t / mu + I(1) / mu, 1e-12);
    EXPECT_NEAR(erp_gamma_pmf(1, p), p.t / mu + (I(2) - 2.0 * I(1)) / mu, 1e-12);
    for (int n = 2; n < 15; ++n) {
      EXPECT_NEAR(erp_gamma_pmf(n, p), (I(n - 1) - 2.0 * I(n) + I(n + 1)) / mu, 1e-12);
    }
    EXPECT_NEAR(erp_gamma_count_survival(1, p), p.t / mu - I(1) / mu, 1e-12);
    for (int n = 2; n < 15; ++n) {
      EXPECT_NEAR(erp_gamma_count_survival(n, p), (I(n - 1) - I(n)) / mu, 1e-12);
    }
  }
}

TEST(ErpGammaSurvival, Examples) {
  EXPECT_NEAR(erp_gamma_count_survival(1, params(3, 1)), 1.0 - std::exp(-3.0), 1e-14);
  EXPECT_NEAR(erp_gamma_count_survival(1, params(3, 1)), 0.9502129316, 1e-10);
  EXPECT_EQ(erp_gamma_count_survival(0, params(3, 1)), 1.0);
  const auto p = params(2.74, 1.15);
  for (int n = 1; n <= 30; ++n) {
    EXPECT_NEAR(erp_gamma_count_survival(n, p) - erp_gamma_count_survival(n + 1, p),
                erp_gamma_pmf(n, p), 1e-11)
        << n;
  }
}

TEST(ErpGammaSurvival, NonIncreasingToZero) {
  for (double a : kAlphaGrid) {
    for (double b : kBetaGrid) {
      const auto p = params(a, b);
      double prev = 1.0;
      for (int n = 1; n < 400; n += 3) {
        const double g = erp_gamma_count_survival(n, p);
        EXPECT_LE(g, prev + 1e-15);
        prev = g;
      }
      EXPECT_LT(prev, 1e-10);
    }
  }
}

TEST(PoissonReduction, BetaOneGivesPoisson) {
  for (double a : {0.5, 2.38, 8.0}) {
    const auto p = params(a, 1.0);
    for (int n = 0; n <= 50; ++n) {
      const double ref = oracle::poisson_pmf(n, a);
      EXPECT_NEAR(rp_gamma_pmf(n, p), ref, 1e-10) << "alpha=" << a << " n=" << n;
      EXPECT_NEAR(erp_gamma_pmf(n, p), ref, 1e-10) << "alpha=" << a << " n=" << n;
    }
  }
}

TEST(Tables, NormalizationMeanAndTruncationRule) {
  for (double a : kAlphaGrid) {
    for (double b : kBetaGrid) {
      const auto p = params(a, b);
      const CountTable erp = erp_gamma_table(p);
      const CountTable rp = rp_gamma_table(p);
      EXPECT_NEAR(erp.total(), 1.0, 1e-8) << a << "," << b;
      EXPECT_NEAR(rp.total(), 1.0, 1e-8) << a << "," << b;
      EXPECT_NEAR(erp.mean(), a / b, 1e-6) << a << "," << b;

      // n_max is the first n with G_n < 1e-10 (or the cap).
      const auto n_max = static_cast<int>(erp.n_max());
      EXPECT_LT(erp_gamma_count_survival(n_max, p), 1e-10);
      EXPECT_GE(erp_gamma_count_survival(n_max - 1, p), 1e-10);
      EXPECT_LE(erp.n_max(), truncation_cap(p.expected_count()));
    }
  }
}

TEST(Tables, MatchPointwiseEvaluation) {
  const auto p = params(8.0, 0.25);
  const CountTable erp = erp_gamma_table(p);
  const CountTable rp = rp_gamma_table(p);
  for (int n = 0; n <= static_cast<int>(erp.n_max()); n += 7) {
    EXPECT_NEAR(erp.pmf[n], erp_gamma_pmf(n, p), 1e-14);
    EXPECT_NEAR(erp.survival[n], erp_gamma_count_survival(n, p), 1e-14);
  }
  for (int n = 0; n <= static_cast<int>(rp.n_max()); n += 7) {
    EXPECT_NEAR(rp.pmf[n], rp_gamma_pmf(n, p), 1e-14);
    EXPECT_NEAR(rp.survival[n], rp_gamma_count_survival(n, p), 1e-14);
  }
}

TEST(Dispersion, SignFollowsShape) {
  for (double a : kAlphaGrid) {
    const CountTable over = erp_gamma_table(params(a, 0.25));
    const CountTable under = erp_gamma_table(params(a, 4.0));
    EXPECT_GT(over.variance(), over.mean()) << a;
    EXPECT_LT(under.variance(), under.mean()) << a;
  }
}

TEST(Hurdle, ZeroShiftIsPlainRenewal) {
  for (int m : {1, 2, 3, 5}) {
    const auto p = params(2.38, 0.87);
    const HurdleSpec h{m, 0.0};
    for (int n = 0; n < 20; ++n) {
      EXPECT_EQ(rp_gamma_hurdle_pmf(n, p, h), rp_gamma_pmf(n, p));
    }
  }
}

TEST(Hurdle, FirstInterarrivalShift) {
  const auto p = params(2.0, 1.3);
  const HurdleSpec h{1, 0.4};
  EXPECT_NEAR(rp_gamma_hurdle_pmf(0, p, h), 1.0 - boost::math::gamma_p(1.7, 2.0), 1e-13);
  for (int n = 1; n < 10; ++n) {
    const double expect = boost::math::gamma_p(n * 1.3 + 0.4, 2.0) -
                          boost::math::gamma_p((n + 1) * 1.3 + 0.4, 2.0);
    EXPECT_NEAR(rp_gamma_hurdle_pmf(n, p, h), expect, 1e-13) << n;
  }
}

TEST(Hurdle, ThirdInterarrivalHeavisideShape) {
  const auto p = params(2.38, 0.87);
  const HurdleSpec h{3, 0.66};
  // Events 0..2 see no shift; from the 3rd event onwards the shape carries delta.
  for (int n = 0; n < 12; ++n) {
    const double lo = n == 0 ? 1.0 : boost::math::gamma_p(n * 0.87 + (n >= 3 ? 0.66 : 0.0), 2.38);
    const double hi = boost::math::gamma_p((n + 1) * 0.87 + (n + 1 >= 3 ? 0.66 : 0.0), 2.38);
    EXPECT_NEAR(rp_gamma_hurdle_pmf(n, p, h), lo - hi, 1e-13) << n;
  }
  const CountTable table = rp_gamma_hurdle_table(p, h);
  EXPECT_NEAR(table.total(), 1.0, 1e-10);
}

TEST(Hurdle, RejectsShapeBelowZero) {
  const auto p = params(2.0, 1.0);
  EXPECT_THROW(rp_gamma_hurdle_pmf(0, p, HurdleSpec{1, -1.0}), DomainError);
  EXPECT_THROW(rp_gamma_hurdle_pmf(0, p, HurdleSpec{0, 0.1}), DomainError);
  EXPECT_NO_THROW(rp_gamma_hurdle_pmf(0, p, HurdleSpec{1, -0.9}));
}

TEST(Mixture, DegenerateAndEqualComponents) {
  const GammaMixtureSpec one{params(3.98, 1.95), params(3.98, 0.93), 1.0};
  for (int n = 0; n < 15; ++n) {
    EXPECT_EQ(erp_gamma_mixture_pmf(n, one), erp_gamma_pmf(n, one.component1));
  }
  for (double w : {0.1, 0.5, 0.9}) {
    const GammaMixtureSpec same{params(2.0, 0.7), params(2.0, 0.7), w};
    for (int n = 0; n < 15; ++n) {
      EXPECT_NEAR(erp_gamma_mixture_pmf(n, same), erp_gamma_pmf(n, same.component1), 1e-15);
    }
  }
}

TEST(Mixture, NormalizesAtTableOneBetaMixture) {
  const GammaMixtureSpec mix{params(3.98, 1.95), params(3.98, 0.93), 0.85};
  double total = 0.0;
  for (int n = 0; n <= 200; ++n) total += erp_gamma_mixture_pmf(n, mix);
  EXPECT_NEAR(total, 1.0, 1e-10);
  const CountTable table = erp_gamma_mixture_table(mix);
  EXPECT_NEAR(table.total(), 1.0, 1e-10);
  EXPECT_NEAR(table.mean(), 0.85 * 3.98 / 1.95 + 0.15 * 3.98 / 0.93, 1e-6);
  EXPECT_THROW(erp_gamma_mixture_pmf(0, GammaMixtureSpec{params(1, 1), params(1, 1, 2.0), 0.5}),
               DomainError);
  EXPECT_THROW(erp_gamma_mixture_pmf(0, GammaMixtureSpec{params(1, 1), params(1, 1), 0.0}),
               DomainError);
}

TEST(ErpGammaPmf, LargeShapeSumsStayFinite) {
  // n beta in the hundreds: the Gamma-ratio terms must not overflow.
  const auto p = params(300.0, 2.5);
  const CountTable table = erp_gamma_table(p);
  EXPECT_NEAR(table.total(), 1.0, 1e-8);
  EXPECT_NEAR(table.mean(), 120.0, 1e-6);
}

}  // namespace
}  // namespace renewcount
