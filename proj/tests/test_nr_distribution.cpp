#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "failsafe/error.hpp"
#include "failsafe/normal.hpp"
#include "failsafe/nr_distribution.hpp"
#include "oracles.hpp"

using namespace failsafe;
namespace oracle = failsafe::testing;

namespace {

const Approach kBoth[] = {Approach::Truncated, Approach::Folded};

// Largest |pdf_T - pdf_F| and largest pdf_T on an even grid over [0, window].
std::pair<double, double> pdf_gap(int k, int points = 4001) {
  const NrDistribution t(Approach::Truncated, k);
  const NrDistribution f(Approach::Folded, k);
  const double hi = oracle::nr_upper_window(t.params);
  double gap = 0.0;
  double peak = 0.0;
  for (int i = 0; i < points; ++i) {
    const double n = hi * i / (points - 1);
    const double pt = nr_pdf(n, t);
    gap = std::max(gap, std::abs(pt - nr_pdf(n, f)));
    peak = std::max(peak, pt);
  }
  return {gap, peak};
}

}  // namespace

TEST(SumParams, KFifteenReference) {
  const auto p = sum_params(15, 0.05);
  EXPECT_EQ(p.k, 15);
  EXPECT_NEAR(p.mu, 11.968268412043, 1e-11);
  EXPECT_NEAR(p.sigma_sq, 5.45070341448628, 1e-12);
  EXPECT_NEAR(p.sigma, std::sqrt(5.45070341448628), 1e-12);
  EXPECT_NEAR(p.lambda, 2.39766979628907, 1e-12);
  EXPECT_NEAR(p.z_alpha, 1.6448536269514722843, 1e-15);
  EXPECT_NEAR(p.truncation_point(), p.z_alpha * std::sqrt(15.0), 1e-14);
  EXPECT_NEAR(p.lambda, (p.mu - p.truncation_point()) / p.sigma, 1e-15);
}

TEST(SumParams, SingleStudyIsHalfNormal) {
  const auto p = sum_params(1);
  EXPECT_NEAR(p.mu, std::sqrt(2.0 / M_PI), 1e-16);
  EXPECT_NEAR(p.sigma_sq, 1.0 - 2.0 / M_PI, 1e-16);
  EXPECT_EQ(p.alpha, kDefaultAlpha);
}

TEST(SumParams, Validation) {
  EXPECT_THROW(sum_params(0), DomainError);
  EXPECT_THROW(sum_params(-3), DomainError);
  EXPECT_THROW(sum_params(5, 0.5), DomainError);
  EXPECT_THROW(sum_params(5, 0.0), DomainError);
}

TEST(Approach, NamesRoundTrip) {
  for (auto a : kBoth) EXPECT_EQ(parse_approach(to_string(a)), a);
  EXPECT_EQ(to_string(Approach::Truncated), "truncated");
  EXPECT_EQ(to_string(Approach::Folded), "folded");
  EXPECT_THROW(parse_approach("both"), DomainError);
}

TEST(NrPdf, SupportEdges) {
  const NrDistribution t(Approach::Truncated, 15);
  const NrDistribution f(Approach::Folded, 15);
  EXPECT_EQ(t.support_lower(), 0.0);
  EXPECT_EQ(f.support_lower(), -15.0);
  EXPECT_EQ(nr_pdf(-1e-9, t), 0.0);
  EXPECT_EQ(nr_pdf(-3.0, t), 0.0);
  EXPECT_GT(nr_pdf(0.0, t), 0.0);
  EXPECT_EQ(nr_pdf(-15.5, f), 0.0);
  EXPECT_THROW(nr_pdf(-15.0, f), SingularityError);
  EXPECT_GT(nr_pdf(-3.0, f), 0.0);
  // 1/sqrt(n + k) blow-up next to the singular point.
  EXPECT_GT(nr_pdf(-1.0 + 1e-12, NrDistribution(Approach::Folded, 1)),
            nr_pdf(-1.0 + 1e-6, NrDistribution(Approach::Folded, 1)));
  EXPECT_GT(nr_pdf(-1.0 + 1e-12, NrDistribution(Approach::Folded, 1)), 1e3);
}

TEST(NrPdf, FiniteFarInTails) {
  for (auto a : kBoth) {
    const NrDistribution d(a, 5);
    EXPECT_EQ(nr_pdf(1e7, d), 0.0);
    EXPECT_GE(nr_pdf(400.0, d), 0.0);
  }
}

class NrPerK : public ::testing::TestWithParam<int> {};

TEST_P(NrPerK, IntegratesToOne) {
  for (auto a : kBoth) {
    const NrDistribution d(a, GetParam());
    EXPECT_NEAR(oracle::integrate_pdf(d), 1.0, 1e-6) << to_string(a);
  }
}

INSTANTIATE_TEST_SUITE_P(Normalization, NrPerK, ::testing::Values(2, 5, 15, 25, 50, 100));

class NrMomentsPerK : public ::testing::TestWithParam<int> {};

TEST_P(NrMomentsPerK, ClosedFormsMatchQuadrature) {
  for (auto a : kBoth) {
    const NrDistribution d(a, GetParam());
    const auto closed = nr_moments(d);
    const auto quad = oracle::quadrature_moments(d);
    EXPECT_NEAR(closed.mean / quad.mean, 1.0, 1e-5) << to_string(a);
    EXPECT_NEAR(closed.variance / quad.variance, 1.0, 1e-5) << to_string(a);
  }
}

TEST_P(NrMomentsPerK, CorrectionStructure) {
  const int k = GetParam();
  const auto t = nr_moments(NrDistribution(Approach::Truncated, k));
  const auto f = nr_moments(NrDistribution(Approach::Folded, k));
  EXPECT_EQ(f.epsilon, 0.0);
  EXPECT_EQ(f.delta, 0.0);
  EXPECT_GE(t.epsilon, 0.0);
  // The differences cancel down to a few ulps of the moments themselves.
  const double eps = std::numeric_limits<double>::epsilon();
  EXPECT_NEAR(t.mean - f.mean, t.epsilon, 8 * eps * std::abs(f.mean));
  EXPECT_NEAR(t.variance - f.variance, t.delta, 8 * eps * f.variance);
  EXPECT_GT(t.variance, 0.0);
  EXPECT_GT(f.variance, 0.0);
}

TEST_P(NrMomentsPerK, CdfAtMeanMatchesIntegratedPdf) {
  for (auto a : kBoth) {
    const NrDistribution d(a, GetParam());
    const double m = nr_moments(d).mean;
    EXPECT_NEAR(nr_cdf(m, d), oracle::quadrature_cdf(d, m), 1e-6) << to_string(a);
  }
}

INSTANTIATE_TEST_SUITE_P(Moments, NrMomentsPerK, ::testing::Values(2, 5, 15, 50, 200));

TEST(NrMoments, FoldedReferenceAtK15) {
  const auto m = nr_moments(NrDistribution(Approach::Folded, 15));
  EXPECT_NEAR(m.mean, 39.9575915966598, 1e-10);
  EXPECT_NEAR(m.variance, 434.762075996676, 1e-8);
}

TEST(NrMoments, TruncatedVarianceCorrection) {
  // Derived from lower-truncated normal moments and confirmed by quadrature.
  EXPECT_NEAR(nr_moments(NrDistribution(Approach::Truncated, 5)).delta, -5.0719, 5e-4);
  EXPECT_NEAR(nr_moments(NrDistribution(Approach::Truncated, 15)).delta, -12.0948, 5e-4);
  EXPECT_NEAR(nr_moments(NrDistribution(Approach::Truncated, 50)).delta, -4.79e-6, 1e-8);
}

TEST(NrMoments, MillsRatioStaysFiniteForNegativeLambda) {
  // k = 1, alpha = 0.001: the truncation point sits far above the sum's mean.
  const NrDistribution d(Approach::Truncated, 1, 1e-3);
  ASSERT_LT(d.params.lambda, -2.0);
  const auto m = nr_moments(d);
  EXPECT_TRUE(std::isfinite(m.mean));
  EXPECT_TRUE(std::isfinite(m.variance));
  EXPECT_GT(m.variance, 0.0);
  const auto q = oracle::quadrature_moments(d);
  EXPECT_NEAR(m.mean / q.mean, 1.0, 1e-5);
  EXPECT_NEAR(m.variance / q.variance, 1.0, 1e-5);
}

TEST(NrCdf, AgreesWithQuadratureAndEdges) {
  for (int k : {5, 15, 50}) {
    for (auto a : kBoth) {
      const NrDistribution d(a, k);
      const double sd = std::sqrt(nr_moments(d).variance);
      const double mean = nr_moments(d).mean;
      for (double z : {-1.0, 0.0, 0.5, 2.0, 4.0}) {
        const double x = std::max(0.5, mean + z * sd);
        EXPECT_NEAR(nr_cdf(x, d), oracle::quadrature_cdf(d, x), 1e-7) << k << ' ' << to_string(a) << ' ' << x;
      }
      EXPECT_NEAR(nr_cdf(1e6, d), 1.0, 1e-15);
    }
    EXPECT_EQ(nr_cdf(0.0, NrDistribution(Approach::Truncated, k)), 0.0);
    EXPECT_EQ(nr_cdf(-1.0, NrDistribution(Approach::Truncated, k)), 0.0);
    EXPECT_EQ(nr_cdf(-k, NrDistribution(Approach::Folded, k)), 0.0);
    EXPECT_GT(nr_cdf(-k + 0.5, NrDistribution(Approach::Folded, k)), 0.0);
  }
}

TEST(NrCdf, MonotoneAndRightContinuous) {
  for (auto a : kBoth) {
    const NrDistribution d(a, 15);
    double prev = 0.0;
    for (int i = 0; i < 42000; ++i) {
      const double x = -20.0 + 0.01 * i;
      const double c = nr_cdf(x, d);
      ASSERT_GE(c, prev) << x;
      ASSERT_LE(c, 1.0);
      EXPECT_NEAR(nr_cdf(x + 1e-10, d), c, 1e-9);
      prev = c;
    }
  }
}

TEST(NrQuantile, RoundTrip) {
  for (int k : {2, 15, 50}) {
    for (auto a : kBoth) {
      const NrDistribution d(a, k);
      const double mean = nr_moments(d).mean;
      const double sd = std::sqrt(nr_moments(d).variance);
      for (double z : {-0.8, -0.3, 0.0, 0.7, 1.5, 3.0}) {
        const double x = mean + z * sd;
        if (x <= d.support_lower() + 0.1) continue;
        EXPECT_NEAR(nr_quantile(nr_cdf(x, d), d), x, 1e-6 * std::max(1.0, std::abs(x))) << k << ' ' << x;
      }
      for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
        EXPECT_NEAR(nr_cdf(nr_quantile(p, d), d), p, 1e-8) << k << ' ' << p;
      }
    }
  }
}

TEST(NrQuantile, LowerTailAndDomain) {
  const NrDistribution t(Approach::Truncated, 15);
  const double q = nr_quantile(1e-12, t);
  EXPECT_GE(q, 0.0);
  EXPECT_LT(q, 1e-6);
  for (double p : {0.0, 1.0, -0.2, 2.0}) EXPECT_THROW(nr_quantile(p, t), DomainError);
}

TEST(NrQuantile, FoldedMedianMatchesBisectedQuadratureCdf) {
  const NrDistribution f(Approach::Folded, 15);
  const double median = oracle::bisect([&](double x) { return oracle::quadrature_cdf(f, x); }, 0.5, 0.0, 200.0, 1e-10);
  EXPECT_NEAR(nr_quantile(0.5, f), median, 1e-6);
}

TEST(NrCf, IdentityAtZero) {
  for (int k : {1, 5, 15, 500}) {
    for (auto a : kBoth) {
      const auto v = nr_cf(0.0, NrDistribution(a, k));
      EXPECT_EQ(v.real(), 1.0);
      EXPECT_EQ(v.imag(), 0.0);
    }
  }
  const auto ci = cf_intermediates(0.0, sum_params(15));
  EXPECT_EQ(ci.mu1, std::complex<double>(0.0, 0.0));
  EXPECT_EQ(ci.sigma1_sq, std::complex<double>(1.0, 0.0));
}

TEST(NrCf, ModulusBoundedAndContinuousAtZero) {
  for (int k : {5, 15, 50}) {
    for (auto a : kBoth) {
      const NrDistribution d(a, k);
      for (double t : {-1.0, -0.1, -0.01, 0.01, 0.1, 1.0}) EXPECT_LE(std::abs(nr_cf(t, d)), 1.0 + 1e-12) << t;
      EXPECT_NEAR(std::abs(nr_cf(1e-9, d) - 1.0), 0.0, 1e-5);
      // Hermitian symmetry of a real random variable's CF.
      EXPECT_NEAR(std::abs(nr_cf(-0.3, d) - std::conj(nr_cf(0.3, d))), 0.0, 1e-13);
    }
  }
}

TEST(NrCf, SlopeAtZeroIsTheMean) {
  for (auto a : kBoth) {
    const NrDistribution d(a, 15);
    const double h = 1e-6;
    const double deriv = (nr_cf(h, d) - nr_cf(-h, d)).imag() / (2 * h);
    EXPECT_NEAR(deriv / nr_moments(d).mean, 1.0, 1e-6) << to_string(a);
  }
}

class NrCfFourier : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(NrCfFourier, MatchesNumericalFourierIntegral) {
  const auto [k, t] = GetParam();
  for (auto a : kBoth) {
    const NrDistribution d(a, k);
    const auto closed = nr_cf(t, d);
    const auto numeric = oracle::fourier_integral(d, t);
    EXPECT_NEAR(closed.real(), numeric.real(), 1e-4) << to_string(a);
    EXPECT_NEAR(closed.imag(), numeric.imag(), 1e-4) << to_string(a);
  }
}

INSTANTIATE_TEST_SUITE_P(Grid, NrCfFourier,
                         ::testing::Combine(::testing::Values(5, 15, 50), ::testing::Values(0.01, 0.05, 0.2)));

TEST(NrPdfAsymptotic, IsTruncatedTimesNormalizer) {
  for (int k : {2, 5, 15, 50}) {
    const NrDistribution t(Approach::Truncated, k);
    const double norm = normal::cdf(t.params.lambda);
    for (double n = 0.0; n < 300.0; n += 3.7) {
      EXPECT_NEAR(nr_pdf_asymptotic(n, t.params), nr_pdf(n, t) * norm, 1e-15 + 1e-13 * nr_pdf(n, t));
    }
    EXPECT_EQ(nr_pdf_asymptotic(-0.1, t.params), 0.0);
  }
}

TEST(NrPdfAsymptotic, NegligibleGapAtK50) {
  const NrDistribution t(Approach::Truncated, 50);
  const double hi = oracle::nr_upper_window(t.params);
  double gap = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double n = hi * i / 4000;
    gap = std::max(gap, std::abs(nr_pdf_asymptotic(n, t.params) - nr_pdf(n, t)));
  }
  EXPECT_LT(gap, 1e-6);
}

TEST(NrPdfAsymptotic, AtK5DiffersFromTruncatedNotFromFolded) {
  // On n_r >= 0 the folded law only adds the reflected kernel, which is ~1e-7 here.
  // Dropping the normalizer is what shows at small k.
  const NrDistribution f(Approach::Folded, 5);
  const NrDistribution t(Approach::Truncated, 5);
  const auto p = sum_params(5);
  const double peak = nr_pdf(nr_quantile(0.5, f), f);
  EXPECT_GT(std::abs(nr_pdf_asymptotic(0.0, p) - nr_pdf(0.0, t)), 0.05 * peak);
  for (double n : {0.0, 1.0, 5.0, 20.0}) {
    const double r = std::sqrt(n + p.k);
    const double reflected = p.z_alpha / (2.0 * p.sigma * r) * normal::pdf((p.z_alpha * r + p.mu) / p.sigma);
    EXPECT_NEAR(nr_pdf(n, f) - nr_pdf_asymptotic(n, p), reflected, 1e-15) << n;
  }
}

TEST(NrPdfGap, ShrinksWithK) {
  double prev = 1e300;
  for (int k : {5, 10, 15, 25, 50}) {
    const auto [gap, peak] = pdf_gap(k);
    EXPECT_LE(gap, prev) << k;
    prev = gap;
  }
}

TEST(NrPdfGap, SmallAtK15) {
  const auto [gap, peak] = pdf_gap(15);
  EXPECT_LT(gap, 0.10 * peak);
  // Frozen from the grid evaluation: the gap is under 1% of the peak.
  EXPECT_LT(gap, 0.01 * peak);
}
