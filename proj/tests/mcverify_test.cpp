// Copyright 2026 The bifbm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bifbm/mcverify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bifbm/errors.hpp"
#include "bifbm/exactstats.hpp"
#include "bifbm/rng.hpp"
#include "bifbm/sampler.hpp"
#include "gtest/gtest.h"

namespace bifbm {
namespace {

double phi_reference(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// sup over a dense grid of |F_m(z) - Phi(z)|, with F_m evaluated by counting.
double ks_dense_grid(const std::vector<double>& sorted, std::size_t points) {
  const double lo = sorted.front() - 1.0, hi = sorted.back() + 1.0;
  double worst = 0.0;
  const double m = static_cast<double>(sorted.size());
  for (std::size_t g = 0; g <= points; ++g) {
    const double z = lo + (hi - lo) * g / points;
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), z) -
                       sorted.begin();
    const auto strictly = std::lower_bound(sorted.begin(), sorted.end(), z) -
                          sorted.begin();
    const double p = phi_reference(z);
    worst = std::max({worst, std::abs(below / m - p), std::abs(strictly / m - p)});
  }
  return worst;
}

// E[phi(N)] by composite Simpson on [-12, 12].
double gaussian_expectation(const std::function<double(double)>& f) {
  const int n = 200000;
  const double a = -12.0, b = 12.0, h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * f(x) * std::exp(-0.5 * x * x);
  }
  return sum * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

TEST(KsDistanceTest, Examples) {
  const std::vector<double> zero = {0.0};
  EXPECT_DOUBLE_EQ(ks_distance(zero), 0.5);
  const std::vector<double> wide = {-40.0, 40.0};
  EXPECT_NEAR(ks_distance(wide), 0.5, 1e-15);
}

TEST(KsDistanceTest, MatchesDenseGrid) {
  std::vector<double> x(20);
  NormalStream(8, 0).fill(x);
  for (double& v : x) v = 0.7 * v + 0.2;
  std::sort(x.begin(), x.end());
  EXPECT_NEAR(ks_distance(x), ks_dense_grid(x, 1000000), 1e-6);
}

TEST(KsDistanceTest, Errors) {
  EXPECT_THROW(ks_distance(std::vector<double>{}), DomainError);
  EXPECT_THROW(ks_distance(std::vector<double>{1.0, 0.0}), DomainError);
}

TEST(KsDistanceTest, PureNormalControlShrinks) {
  std::vector<double> d;
  for (std::uint64_t rep = 0; rep < 32; ++rep) {
    std::vector<double> x(10000);
    NormalStream(99, rep).fill(x);
    std::sort(x.begin(), x.end());
    d.push_back(ks_distance(x));
  }
  EXPECT_LT(median(d), 0.02);
}

TEST(NormalCdfTest, Values) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316301, 1e-15);
}

TEST(McVnSampleTest, BrownianIsNormalisedChiSquare) {
  const std::size_t n = 32, m = 200;
  const auto summary = mc_vn_sample({0.5, 1.0}, n, m, 4);
  std::vector<double> expected;
  for (std::size_t j = 0; j < m; ++j) {
    const auto y = sample_increments({0.5, 1.0}, n, 4, j).increments;
    double z = 0.0;
    for (double v : y) z += v * v - 1.0;
    expected.push_back(z / std::sqrt(2.0 * n));
  }
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(summary.sample.size(), m);
  for (std::size_t j = 0; j < m; ++j) {
    EXPECT_NEAR(summary.sample[j], expected[j], 1e-12);
  }
  EXPECT_EQ(summary.ks_distance, ks_distance(summary.sample));
}

TEST(McVnSampleTest, ThreadCountDoesNotChangeDraws) {
  const IncrementSampler s({0.6, 0.5}, 40);
  const double var = var_zn(s.gram());
  const auto one = vn_draws(s, var, 3, 7, 333, 1);
  const auto many = vn_draws(s, var, 3, 7, 333, 4);
  EXPECT_EQ(one, many);
  const auto tail = vn_draws(s, var, 3, 7 + 100, 233, 2);
  EXPECT_TRUE(std::equal(tail.begin(), tail.end(), one.begin() + 100));
}

TEST(McVnSampleTest, Standardised) {
  for (const BifBmParams p : {BifBmParams(0.6, 0.5), BifBmParams(0.75, 0.8)}) {
    const std::size_t m = 100000;
    const auto s = mc_vn_sample(p, 64, m, 5);
    double mean = 0.0;
    for (double v : s.sample) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : s.sample) var += (v - mean) * (v - mean);
    var /= m - 1.0;
    EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(var / m)) << "hk=" << p.hk();
    EXPECT_NEAR(var, 1.0, 0.05) << "hk=" << p.hk();
  }
}

TEST(McVnSampleTest, KolmogorovDistanceBelowSteinBound) {
  const std::size_t n = 1024, m = 10000;
  const double slack = 3.0 * std::sqrt(std::log(2.0 / 0.001) / (2.0 * m));
  for (const BifBmParams p : {BifBmParams(0.6, 0.5), BifBmParams(0.75, 0.8)}) {
    const auto s = mc_vn_sample(p, n, m, 6);
    const double bound = stein_bound(build_gram(p, n));
    EXPECT_LE(s.ks_distance, bound + slack) << "hk=" << p.hk();
  }
}

TEST(McVnSampleTest, KsTestAtSignificanceLevel) {
  // Kolmogorov 0.1% critical value 1.95 / sqrt(m) plus the exact bound on
  // the distance of V_n itself.
  const std::size_t n = 1024, m = 10000;
  const BifBmParams p(0.6, 0.5);
  const auto s = mc_vn_sample(p, n, m, 7);
  EXPECT_LT(s.ks_distance, 1.95 / std::sqrt(double(m)) +
                               stein_bound(build_gram(p, n)));
}

TEST(McVnSampleTest, Errors) {
  EXPECT_THROW(mc_vn_sample({0.6, 0.5}, 16, 99, 1), DomainError);
  EXPECT_THROW(mc_vn_sample({0.6, 0.5}, 16, 0, 1), DomainError);
  EXPECT_THROW(mc_vn_sample({0.95, 1.0}, 16, 1000, 1), DomainError);
  EXPECT_THROW(mc_vn_sample({0.6, 0.5}, 100, 1000, 1, {1, 64}), CapacityError);
}

TEST(TestFunctionTest, TargetsMatchQuadrature) {
  for (const auto& f : {cosine_function(), sine_function(),
                        logistic_step_function(), clamped_square_function(),
                        clamped_square_function(1.5), constant_function(2.5)}) {
    EXPECT_NEAR(f.target, gaussian_expectation(f.phi), 1e-9) << f.name;
  }
}

TEST(TestFunctionTest, ByName) {
  EXPECT_EQ(test_function_by_name("cos").name, "cos");
  EXPECT_EQ(test_function_by_name("clamp_sq").name, "clamp_sq");
  const auto c = test_function_by_name("const:-0.25");
  EXPECT_EQ(c.target, -0.25);
  EXPECT_EQ(c.phi(3.0), -0.25);
  EXPECT_THROW(test_function_by_name("tan"), DomainError);
  EXPECT_THROW(test_function_by_name("const:"), DomainError);
  EXPECT_THROW(test_function_by_name("const:1x"), DomainError);
}

TEST(HarmonicTest, WeightIdentity) {
  EXPECT_EQ(harmonic_number(1), 1.0);
  EXPECT_NEAR(harmonic_number(4), 25.0 / 12.0, 1e-15);
  for (std::size_t n : {8, 100, 8192, 1000000}) {
    const double ln = std::log(static_cast<double>(n));
    const double r = harmonic_number(n) / ln;
    EXPECT_GE(r, 1.0);
    EXPECT_LE(r, 1.0 + 2.0 / ln);
  }
}

TEST(DivisorsTest, Values) {
  EXPECT_EQ(divisors(12), (std::vector<std::size_t>{1, 2, 3, 4, 6, 12}));
  EXPECT_EQ(divisors(2520).size(), 48u);
  EXPECT_EQ(divisors(2521).size(), 2u);
}

TEST(SchemeTest, RoundTrip) {
  for (auto s : {AscltScheme::kExactDivisor, AscltScheme::kSnappedGrid,
                 AscltScheme::kIntegerTimes}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_THROW(parse_scheme("nearest"), DomainError);
}

TEST(AscltBifBmTest, ConstantIsExact) {
  const auto r = asclt_bifbm({0.6, 0.5}, 300, constant_function(0.7), 1);
  EXPECT_EQ(r.weighted_average, 0.7);
  EXPECT_EQ(r.n_max, 300u);
  EXPECT_EQ(r.terms, 300u);
  EXPECT_EQ(r.scheme, AscltScheme::kIntegerTimes);
  EXPECT_NEAR(r.weight_normalizer, harmonic_number(300), 1e-12);
}

TEST(AscltBifBmTest, UnbiasedAcrossPaths) {
  // k^-HK B_k is exactly N(0,1), so every log-average has mean E phi(N).
  const BifBmParams p(0.6, 0.5);
  const BifBmAsclt harness(p, 512);
  for (const auto& f : {cosine_function(), logistic_step_function()}) {
    const std::size_t reps = 200;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double v = harness.run(f, 21, r).weighted_average;
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt((sum2 - reps * mean * mean) / (reps - 1.0));
    EXPECT_NEAR(mean, f.target, 4.0 * sd / std::sqrt(double(reps))) << f.name;
  }
}

TEST(AscltBifBmTest, Deterministic) {
  const BifBmAsclt harness({0.5, 1.0}, 256);
  const auto f = cosine_function();
  EXPECT_EQ(harness.run(f, 3, 5).weighted_average,
            harness.run(f, 3, 5).weighted_average);
  EXPECT_NE(harness.run(f, 3, 5).weighted_average,
            harness.run(f, 3, 6).weighted_average);
  EXPECT_THROW(BifBmAsclt({0.5, 1.0}, 0), DomainError);
  EXPECT_THROW(BifBmAsclt({0.5, 1.0}, 100, 50), CapacityError);
}

TEST(AscltVnTest, ConstantIsExact) {
  const auto r = asclt_vn({0.6, 0.5}, 360, constant_function(1.0), 2);
  EXPECT_EQ(r.weighted_average, 1.0);
  EXPECT_EQ(r.scheme, AscltScheme::kExactDivisor);
  EXPECT_EQ(r.terms, divisors(360).size());
  EXPECT_EQ(r.n_max, 360u);
}

TEST(AscltVnTest, ResolutionsForHighlyCompositeGrid) {
  const VnAsclt harness({0.6, 0.5}, 2520, AscltScheme::kExactDivisor);
  EXPECT_EQ(harness.resolutions(), divisors(2520));
}

TEST(AscltVnTest, SnappedEqualsExactOnDivisors) {
  const BifBmParams p(0.6, 0.5);
  const VnAsclt exact(p, 360, AscltScheme::kExactDivisor);
  const VnAsclt snapped(p, 360, AscltScheme::kSnappedGrid);
  ASSERT_EQ(snapped.resolutions().size(), 360u);
  const auto ve = exact.vk_values(9, 1);
  const auto vs = snapped.vk_values(9, 1);
  const auto& ks = exact.resolutions();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    EXPECT_EQ(ve[i], vs[ks[i] - 1]) << "k=" << ks[i];
  }
}

TEST(AscltVnTest, MatchesDirectQuadraticVariation) {
  const BifBmParams p(0.7, 0.8);
  const std::size_t grid_n = 60;
  const VnAsclt harness(p, grid_n, AscltScheme::kExactDivisor);
  std::vector<double> grid(grid_n + 1);
  for (std::size_t i = 0; i <= grid_n; ++i) grid[i] = double(i) / grid_n;
  const auto path = sample_grid(p, grid, 13, 2);
  const auto v = harness.vk_values(13, 2);
  const auto& ks = harness.resolutions();
  for (std::size_t idx = 0; idx < ks.size(); ++idx) {
    const std::size_t k = ks[idx], step = grid_n / k;
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = path.values[(i + 1) * step] - path.values[i * step];
      z += std::pow(double(k), 2 * p.hk()) * d * d - theta(p, i, i);
    }
    const double expected = z / std::sqrt(var_zn(build_gram(p, k)));
    EXPECT_NEAR(v[idx], expected, 1e-9 * (1.0 + std::abs(expected))) << k;
  }
}

TEST(AscltVnTest, VkStandardisedAcrossPaths) {
  const BifBmParams p(0.6, 0.5);
  const VnAsclt harness(p, 120, AscltScheme::kExactDivisor);
  const std::size_t reps = 2000;
  const auto& ks = harness.resolutions();
  std::vector<double> sum(ks.size(), 0.0), sum2(ks.size(), 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto v = harness.vk_values(17, r);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      sum[i] += v[i];
      sum2[i] += v[i] * v[i];
    }
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double mean = sum[i] / reps;
    const double second = sum2[i] / reps;
    EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(double(reps))) << ks[i];
    // E V^2 = 1; the fourth moment of V_1 is 15, so allow a wide band.
    EXPECT_NEAR(second, 1.0, 5.0 * std::sqrt(15.0 / reps)) << ks[i];
  }
}

TEST(AscltVnTest, Errors) {
  EXPECT_THROW(VnAsclt({0.6, 0.5}, 2521, AscltScheme::kExactDivisor),
               DomainError);
  try {
    VnAsclt({0.6, 0.5}, 97, AscltScheme::kExactDivisor);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("divisors"), std::string::npos);
  }
  EXPECT_THROW(VnAsclt({0.95, 1.0}, 360, AscltScheme::kExactDivisor),
               DomainError);
  EXPECT_THROW(VnAsclt({0.6, 0.5}, 360, AscltScheme::kIntegerTimes),
               DomainError);
  EXPECT_THROW(VnAsclt({0.6, 0.5}, 0, AscltScheme::kSnappedGrid), DomainError);
  EXPECT_THROW(VnAsclt({0.6, 0.5}, 720, AscltScheme::kExactDivisor, 360),
               CapacityError);
}

}  // namespace
}  // namespace bifbm
