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

// Exact Gaussian sampling of bifractional Brownian motion through a Cholesky
// factor of the covariance. Factors are computed once and shared read-only;
// draws are pure functions of (factor, master_seed, path_index).

#ifndef BIFBM_SAMPLER_HPP_
#define BIFBM_SAMPLER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/errors.hpp"
#include "bifbm/exactstats.hpp"
#include "bifbm/kernel.hpp"

namespace bifbm {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultMaxRelJitter = 1e-6;

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  // epsilon added to the diagonal, 0 when the plain factorisation succeeded.
  double jitter = 0.0;
};

// L with L L^T = matrix + eps I. eps is 0 if the plain factorisation
// succeeds, otherwise the first value of 1e-12 * max_diag * 2^k that works.
// Throws NumericError once eps would exceed max_rel_jitter * max_diag.
CholeskyFactor chol_factor(const Eigen::MatrixXd& matrix,
                           double max_rel_jitter = kDefaultMaxRelJitter,
                           std::size_t cap = kDefaultCap);

// x = L xi with xi a standard normal vector drawn from the path's stream.
class CorrelatedNormal {
 public:
  static constexpr std::size_t kBlockWidth = 16;

  explicit CorrelatedNormal(const Eigen::MatrixXd& lower);

  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(lower_.rows());
  }

  std::vector<double> draw(std::uint64_t master_seed,
                           std::uint64_t path_index) const;

  // Paths first_index .. first_index+count-1 into out (row-major, one row of
  // dim() values per path). Each row equals draw() for that index bit for
  // bit.
  void draw_many(std::uint64_t master_seed, std::uint64_t first_index,
                 std::size_t count, std::span<double> out) const;

 private:
  RowMajorMatrix lower_;
};

struct PathSample {
  BifBmParams params;
  std::size_t n;
  std::vector<double> increments;
  std::uint64_t master_seed;
  std::uint64_t path_index;
};

struct GridSample {
  BifBmParams params;
  std::vector<double> grid;
  std::vector<double> values;
  std::uint64_t master_seed;
  std::uint64_t path_index;
};

// Unit-spaced increments (B_1 - B_0, ..., B_n - B_{n-1}) ~ N(0, Theta).
class IncrementSampler {
 public:
  IncrementSampler(const BifBmParams& params, std::size_t n,
                   std::size_t cap = kDefaultCap,
                   double max_rel_jitter = kDefaultMaxRelJitter);

  const BifBmParams& params() const noexcept { return gram_->params(); }
  std::size_t n() const noexcept { return gram_->n(); }
  const IncrementGram& gram() const noexcept { return *gram_; }
  double jitter() const noexcept { return jitter_; }

  PathSample draw(std::uint64_t master_seed, std::uint64_t path_index) const;
  void draw_many(std::uint64_t master_seed, std::uint64_t first_index,
                 std::size_t count, std::span<double> out) const {
    normal_->draw_many(master_seed, first_index, count, out);
  }

 private:
  std::shared_ptr<const IncrementGram> gram_;
  std::shared_ptr<const CorrelatedNormal> normal_;
  double jitter_ = 0.0;
};

// B on a sorted grid of distinct nonnegative times. B_0 is pinned to 0 and
// only the positive times enter the factorised covariance.
class GridSampler {
 public:
  GridSampler(const BifBmParams& params, std::vector<double> grid,
              std::size_t cap = kDefaultCap,
              double max_rel_jitter = kDefaultMaxRelJitter);

  const BifBmParams& params() const noexcept { return params_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  double jitter() const noexcept { return jitter_; }

  GridSample draw(std::uint64_t master_seed, std::uint64_t path_index) const;

 private:
  BifBmParams params_;
  std::vector<double> grid_;
  bool has_zero_ = false;
  std::shared_ptr<const CorrelatedNormal> normal_;
  double jitter_ = 0.0;
};

PathSample sample_increments(const BifBmParams& params, std::size_t n,
                             std::uint64_t master_seed,
                             std::uint64_t path_index,
                             std::size_t cap = kDefaultCap);

GridSample sample_grid(const BifBmParams& params, std::vector<double> grid,
                       std::uint64_t master_seed, std::uint64_t path_index,
                       std::size_t cap = kDefaultCap);

}  // namespace bifbm

#endif  // BIFBM_SAMPLER_HPP_
