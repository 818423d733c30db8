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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "bifbm/rng.hpp"

namespace bifbm {

namespace {

constexpr double kInitialRelJitter = 1e-12;
constexpr std::size_t kW = CorrelatedNormal::kBlockWidth;

// Factorises m + eps I in place in lower, so only one extra n x n buffer
// is alive.
bool try_factor(const Eigen::MatrixXd& m, double eps, Eigen::MatrixXd& lower) {
  lower = m;
  lower.diagonal().array() += eps;
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(lower);
  if (llt.info() != Eigen::Success) return false;
  lower.triangularView<Eigen::StrictlyUpper>().setZero();
  return lower.allFinite();
}

double max_asymmetry(const Eigen::MatrixXd& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    }
  }
  return worst;
}

// y = L xi for kW paths at once. xi and y are dim x kW row-major. Each lane
// p sees the same operation sequence, so results do not depend on the other
// lanes.
typedef double Lane8 __attribute__((vector_size(64)));

inline Lane8 load8(const double* p) {
  Lane8 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store8(double* p, const Lane8& v) { std::memcpy(p, &v, sizeof v); }

// y = L * xi for kW interleaved columns. Every lane accumulates in ascending
// column order, so a lane's value does not depend on its neighbours.
void lower_times_block(const RowMajorMatrix& lower, const double* xi,
                       double* y) {
  static_assert(kW == 16);
  constexpr std::size_t kRows = 4;
  const auto n = static_cast<std::size_t>(lower.rows());
  const double* base = lower.data();
  std::size_t i = 0;
  for (; i + kRows <= n; i += kRows) {
    Lane8 acc[kRows][2] = {};
    const double* rows = base + i * n;
    for (std::size_t j = 0; j < i + kRows; ++j) {
      const Lane8 x0 = load8(xi + j * kW);
      const Lane8 x1 = load8(xi + j * kW + 8);
      for (std::size_t q = 0; q < kRows; ++q) {
        const double l = j <= i + q ? rows[q * n + j] : 0.0;
        acc[q][0] += l * x0;
        acc[q][1] += l * x1;
      }
    }
    for (std::size_t q = 0; q < kRows; ++q) {
      store8(y + (i + q) * kW, acc[q][0]);
      store8(y + (i + q) * kW + 8, acc[q][1]);
    }
  }
  for (; i < n; ++i) {
    Lane8 a0 = {}, a1 = {};
    const double* row = base + i * n;
    for (std::size_t j = 0; j <= i; ++j) {
      a0 += row[j] * load8(xi + j * kW);
      a1 += row[j] * load8(xi + j * kW + 8);
    }
    store8(y + i * kW, a0);
    store8(y + i * kW + 8, a1);
  }
}

}  // namespace

CholeskyFactor chol_factor(const Eigen::MatrixXd& matrix,
                           double max_rel_jitter, std::size_t cap) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw DomainError("matrix", "must be square and nonempty");
  }
  check_cap(static_cast<std::size_t>(matrix.rows()), cap);
  const double max_diag = matrix.diagonal().cwiseAbs().maxCoeff();
  if (!matrix.allFinite()) throw DomainError("matrix", "non-finite entry");
  if (max_asymmetry(matrix) > 1e-12 * max_diag) {
    throw DomainError("matrix", "must be symmetric");
  }

  CholeskyFactor out;
  if (try_factor(matrix, 0.0, out.lower)) return out;

  const double limit = max_rel_jitter * max_diag;
  for (double eps = kInitialRelJitter * max_diag; eps <= limit; eps *= 2.0) {
    if (try_factor(matrix, eps, out.lower)) {
      out.jitter = eps;
      return out;
    }
  }
  throw NumericError(
      "Cholesky factorisation failed up to the jitter cap; covariance is "
      "not positive semidefinite");
}

CorrelatedNormal::CorrelatedNormal(const Eigen::MatrixXd& lower)
    : lower_(lower.triangularView<Eigen::Lower>()) {}

std::vector<double> CorrelatedNormal::draw(std::uint64_t master_seed,
                                           std::uint64_t path_index) const {
  std::vector<double> out(dim());
  draw_many(master_seed, path_index, 1, out);
  return out;
}

void CorrelatedNormal::draw_many(std::uint64_t master_seed,
                                 std::uint64_t first_index, std::size_t count,
                                 std::span<double> out) const {
  const std::size_t d = dim();
  if (out.size() < count * d) {
    throw DomainError("out", "buffer smaller than count * dim");
  }
  std::vector<double> xi(d * kW);
  std::vector<double> y(d * kW);
  std::vector<double> column(d);
  for (std::size_t start = 0; start < count; start += kW) {
    const std::size_t width = std::min(kW, count - start);
    std::fill(xi.begin(), xi.end(), 0.0);
    for (std::size_t p = 0; p < width; ++p) {
      NormalStream(master_seed, first_index + start + p).fill(column);
      for (std::size_t j = 0; j < d; ++j) xi[j * kW + p] = column[j];
    }
    lower_times_block(lower_, xi.data(), y.data());
    for (std::size_t p = 0; p < width; ++p) {
      double* dst = out.data() + (start + p) * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] = y[j * kW + p];
    }
  }
}

IncrementSampler::IncrementSampler(const BifBmParams& params, std::size_t n,
                                   std::size_t cap, double max_rel_jitter)
    : gram_(std::make_shared<IncrementGram>(build_gram(params, n, cap))) {
  const CholeskyFactor factor =
      chol_factor(gram_->entries(), max_rel_jitter, cap);
  jitter_ = factor.jitter;
  normal_ = std::make_shared<CorrelatedNormal>(factor.lower);
}

PathSample IncrementSampler::draw(std::uint64_t master_seed,
                                  std::uint64_t path_index) const {
  return {params(), n(), normal_->draw(master_seed, path_index), master_seed,
          path_index};
}

GridSampler::GridSampler(const BifBmParams& params, std::vector<double> grid,
                         std::size_t cap, double max_rel_jitter)
    : params_(params), grid_(std::move(grid)) {
  if (grid_.empty()) throw DomainError("grid", "must be nonempty");
  check_cap(grid_.size(), cap);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(grid_[i]) || grid_[i] < 0.0) {
      throw DomainError("grid", "times must be finite and nonnegative");
    }
    if (i > 0 && grid_[i] <= grid_[i - 1]) {
      throw DomainError("grid", "times must be sorted and distinct");
    }
  }
  has_zero_ = grid_.front() == 0.0;
  const std::size_t offset = has_zero_ ? 1 : 0;
  const std::size_t d = grid_.size() - offset;
  if (d == 0) return;
  Eigen::MatrixXd c(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double v = cov(params_, grid_[i + offset], grid_[j + offset]);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  const CholeskyFactor factor = chol_factor(c, max_rel_jitter, cap);
  jitter_ = factor.jitter;
  normal_ = std::make_shared<CorrelatedNormal>(factor.lower);
}

GridSample GridSampler::draw(std::uint64_t master_seed,
                             std::uint64_t path_index) const {
  GridSample out{params_, grid_, std::vector<double>(grid_.size(), 0.0),
                 master_seed, path_index};
  if (!normal_) return out;
  const std::size_t offset = has_zero_ ? 1 : 0;
  const auto values = normal_->draw(master_seed, path_index);
  std::copy(values.begin(), values.end(), out.values.begin() + offset);
  return out;
}

PathSample sample_increments(const BifBmParams& params, std::size_t n,
                             std::uint64_t master_seed,
                             std::uint64_t path_index, std::size_t cap) {
  return IncrementSampler(params, n, cap).draw(master_seed, path_index);
}

GridSample sample_grid(const BifBmParams& params, std::vector<double> grid,
                       std::uint64_t master_seed, std::uint64_t path_index,
                       std::size_t cap) {
  return GridSampler(params, std::move(grid), cap).draw(master_seed, path_index);
}

}  // namespace bifbm
