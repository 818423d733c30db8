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

#include "bifbm/sampler.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/errors.hpp"
#include "bifbm/exactstats.hpp"
#include "bifbm/kernel.hpp"
#include "gtest/gtest.h"

namespace bifbm {
namespace {

// Column means and covariance of m draws stored row-major (m x d).
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

Moments moments(const std::vector<double>& draws, std::size_t m, std::size_t d) {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      x(draws.data(), m, d);
  Moments out;
  out.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - out.mean.transpose();
  out.cov = centered.transpose() * centered / static_cast<double>(m - 1);
  return out;
}

TEST(CholFactorTest, Identity) {
  const auto f = chol_factor(Eigen::MatrixXd::Identity(5, 5));
  EXPECT_TRUE(f.lower.isIdentity(0.0));
  EXPECT_EQ(f.jitter, 0.0);
  const auto bm = chol_factor(build_gram({0.5, 1.0}, 8).entries());
  EXPECT_TRUE(bm.lower.isIdentity(1e-15));
  EXPECT_EQ(bm.jitter, 0.0);
}

TEST(CholFactorTest, GramReconstructs) {
  const IncrementGram g = build_gram({0.3, 0.9}, 256);
  const auto f = chol_factor(g.entries());
  const double max_diag = g.entries().diagonal().maxCoeff();
  EXPECT_LE(f.jitter, 1e-10 * max_diag);
  EXPECT_TRUE(f.lower.isLowerTriangular(0.0));
  const Eigen::MatrixXd back = f.lower * f.lower.transpose();
  EXPECT_LE((back - g.entries()).cwiseAbs().maxCoeff(), 1e-12 + f.jitter);
}

TEST(CholFactorTest, SingularPsdNeedsJitter) {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(6, 1.0, 2.0);
  const Eigen::MatrixXd rank_one = v * v.transpose();
  const auto f = chol_factor(rank_one);
  EXPECT_GT(f.jitter, 0.0);
  EXPECT_LE(f.jitter, 1e-6 * rank_one.diagonal().maxCoeff());
  const Eigen::MatrixXd back = f.lower * f.lower.transpose();
  const Eigen::MatrixXd shifted =
      rank_one + f.jitter * Eigen::MatrixXd::Identity(6, 6);
  EXPECT_LE((back - shifted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CholFactorTest, Errors) {
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(chol_factor(indefinite), NumericError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(chol_factor(asym), DomainError);
  EXPECT_THROW(chol_factor(Eigen::MatrixXd(2, 3)), DomainError);
  EXPECT_THROW(chol_factor(Eigen::MatrixXd(0, 0)), DomainError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(chol_factor(bad), DomainError);
  EXPECT_THROW(chol_factor(Eigen::MatrixXd::Identity(5, 5), 1e-6, 4),
               CapacityError);
}

TEST(IncrementSamplerTest, Deterministic) {
  const auto a = sample_increments({0.6, 0.5}, 50, 17, 3);
  const auto b = sample_increments({0.6, 0.5}, 50, 17, 3);
  ASSERT_EQ(a.increments.size(), 50u);
  EXPECT_EQ(a.increments, b.increments);
  EXPECT_EQ(a.master_seed, 17u);
  EXPECT_EQ(a.path_index, 3u);
  EXPECT_NE(a.increments, sample_increments({0.6, 0.5}, 50, 17, 4).increments);
  EXPECT_NE(a.increments, sample_increments({0.6, 0.5}, 50, 18, 3).increments);
}

TEST(IncrementSamplerTest, BatchAndThreadInvariant) {
  const IncrementSampler s({0.7, 0.8}, 37);
  const std::size_t count = 45;
  std::vector<double> all(count * 37);
  s.draw_many(9, 100, count, all);
  for (std::size_t p = 0; p < count; ++p) {
    const auto one = s.draw(9, 100 + p).increments;
    for (std::size_t i = 0; i < 37; ++i) {
      ASSERT_EQ(all[p * 37 + i], one[i]) << "path " << p;
    }
  }
  // Odd split points and concurrent callers sharing the factor.
  std::vector<double> parts(count * 37);
  std::vector<std::jthread> workers;
  const std::size_t cuts[] = {0, 3, 20, 21, count};
  for (int c = 0; c < 4; ++c) {
    workers.emplace_back([&, c] {
      const std::size_t lo = cuts[c], hi = cuts[c + 1];
      s.draw_many(9, 100 + lo, hi - lo,
                  std::span<double>(parts).subspan(lo * 37, (hi - lo) * 37));
    });
  }
  workers.clear();
  EXPECT_EQ(parts, all);
}

TEST(IncrementSamplerTest, BrownianCoordinatesStandardNormal) {
  const std::size_t n = 1024, m = 100000;
  const IncrementSampler s({0.5, 1.0}, n);
  const std::size_t chunk = 5000;
  std::vector<double> draws(n * chunk);
  std::vector<double> sum(n, 0.0), sum2(n, 0.0);
  for (std::size_t first = 0; first < m; first += chunk) {
    s.draw_many(1, first, chunk, draws);
    for (std::size_t r = 0; r < chunk; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = draws[r * n + i];
        sum[i] += x;
        sum2[i] += x * x;
      }
    }
  }
  const double dm = static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = sum[i] / dm;
    const double var = (sum2[i] - dm * mean * mean) / (dm - 1.0);
    EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(dm)) << i;
    EXPECT_NEAR(var, 1.0, 0.05) << i;
  }
}

TEST(IncrementSamplerTest, EmpiricalCovarianceMatchesGram) {
  for (const BifBmParams p : {BifBmParams(0.6, 0.5), BifBmParams(0.75, 0.8)}) {
    const std::size_t n = 64, m = 100000;
    const IncrementSampler s(p, n);
    std::vector<double> draws(n * m);
    s.draw_many(2, 0, m, draws);
    const Moments mo = moments(draws, m, n);
    EXPECT_LE((mo.cov - s.gram().entries()).cwiseAbs().maxCoeff(), 0.05)
        << "hk=" << p.hk();
  }
}

TEST(GridSamplerTest, ZeroOnly) {
  const auto g = sample_grid({0.6, 0.5}, {0.0}, 1, 0);
  ASSERT_EQ(g.values.size(), 1u);
  EXPECT_EQ(g.values[0], 0.0);
}

TEST(GridSamplerTest, BrownianIndependentHalves) {
  const GridSampler s({0.5, 1.0}, {0.0, 0.5, 1.0});
  const std::size_t m = 100000;
  std::vector<double> inc(2 * m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto g = s.draw(4, r);
    ASSERT_EQ(g.values[0], 0.0);
    inc[2 * r] = g.values[1] - g.values[0];
    inc[2 * r + 1] = g.values[2] - g.values[1];
  }
  const Moments mo = moments(inc, m, 2);
  EXPECT_NEAR(mo.cov(0, 0), 0.5, 0.01);
  EXPECT_NEAR(mo.cov(1, 1), 0.5, 0.01);
  EXPECT_NEAR(mo.cov(0, 1), 0.0, 0.01);
}

TEST(GridSamplerTest, VarianceScalesAsPower) {
  const BifBmParams p(0.7, 0.6);
  std::vector<double> grid(512);
  for (std::size_t k = 0; k < 512; ++k) grid[k] = k + 1.0;
  const GridSampler s(p, grid);
  const std::size_t m = 20000;
  std::vector<double> sum2(512, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const auto g = s.draw(5, r);
    for (std::size_t k = 0; k < 512; ++k) sum2[k] += g.values[k] * g.values[k];
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < 512; ++k) {
    const double t = k + 1.0;
    const double var = sum2[k] / m;
    EXPECT_NEAR(var / std::pow(t, 2 * p.hk()), 1.0, 0.05) << "t=" << t;
    const double x = std::log(t), y = std::log(var);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (512 * sxy - sx * sy) / (512 * sxx - sx * sx);
  EXPECT_NEAR(slope, 2 * p.hk(), 0.05);
}

TEST(GridSamplerTest, MatchesCumulatedIncrements) {
  // B on {0,1,..,n} and the running sum of unit increments share a law:
  // compare their covariance to R.
  const BifBmParams p(0.6, 0.5);
  std::vector<double> grid = {0.0, 1.0, 2.0, 3.0, 4.0};
  const GridSampler s(p, grid);
  const std::size_t m = 100000;
  std::vector<double> vals(4 * m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto g = s.draw(6, r);
    for (int k = 0; k < 4; ++k) vals[4 * r + k] = g.values[k + 1];
  }
  const Moments mo = moments(vals, m, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      EXPECT_NEAR(mo.cov(a, b), cov(p, a + 1.0, b + 1.0), 0.03);
    }
  }
}

TEST(GridSamplerTest, Errors) {
  const BifBmParams p(0.6, 0.5);
  EXPECT_THROW(GridSampler(p, {}), DomainError);
  EXPECT_THROW(GridSampler(p, {1.0, 0.5}), DomainError);
  EXPECT_THROW(GridSampler(p, {0.5, 0.5}), DomainError);
  EXPECT_THROW(GridSampler(p, {-1.0, 0.5}), DomainError);
  EXPECT_THROW(
      GridSampler(p, {0.0, std::numeric_limits<double>::infinity()}),
      DomainError);
  EXPECT_THROW(GridSampler(p, {1.0, 2.0, 3.0}, 2), CapacityError);
  EXPECT_THROW(IncrementSampler(p, 10, 5), CapacityError);
}

}  // namespace
}  // namespace bifbm
