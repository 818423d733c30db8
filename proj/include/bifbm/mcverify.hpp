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

// Monte Carlo checks of the CLT and almost-sure CLT for V_n and for the
// self-normalised process k^-HK B_k.

#ifndef BIFBM_MCVERIFY_HPP_
#define BIFBM_MCVERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bifbm/errors.hpp"
#include "bifbm/kernel.hpp"
#include "bifbm/sampler.hpp"

namespace bifbm {

double normal_cdf(double x);

// sup_x |F_m(x) - Phi(x)| for the empirical CDF F_m of a sorted sample,
// evaluated at the jump points. Throws DomainError on empty or unsorted
// input.
double ks_distance(std::span<const double> sorted_sample);

struct EcdfSummary {
  BifBmParams params;
  std::size_t n;
  std::size_t m;
  std::vector<double> sample;  // sorted V_n draws
  double ks_distance;
};

struct McOptions {
  // Worker threads; 0 picks std::thread::hardware_concurrency(). The
  // result does not depend on this value.
  unsigned threads = 0;
  std::size_t cap = kDefaultCap;
};

// V_n for paths first_index .. first_index+count-1 (unsorted, path order).
std::vector<double> vn_draws(const IncrementSampler& sampler, double var_zn,
                             std::uint64_t master_seed,
                             std::uint64_t first_index, std::size_t count,
                             unsigned threads = 1);

EcdfSummary mc_vn_sample(const BifBmParams& params, std::size_t n,
                         std::size_t m, std::uint64_t master_seed,
                         const McOptions& options = {});

// A bounded continuous test function together with E[phi(N)], N ~ N(0,1).
struct TestFunction {
  std::string name;
  std::function<double(double)> phi;
  double target;
};

TestFunction constant_function(double c);
TestFunction cosine_function();
TestFunction sine_function();
// 1 / (1 + exp(slope x)), a smoothed indicator of x <= 0. E = 1/2 exactly.
TestFunction logistic_step_function(double slope = 20.0);
// min(x^2, ceiling).
TestFunction clamped_square_function(double ceiling = 4.0);

// "cos", "sin", "logistic", "clamp_sq" or "const:<value>".
TestFunction test_function_by_name(std::string_view name);

enum class AscltScheme { kExactDivisor, kSnappedGrid, kIntegerTimes };

std::string_view to_string(AscltScheme scheme);
AscltScheme parse_scheme(std::string_view text);

struct AscltReport {
  std::string phi_name;
  double weighted_average;
  double target;
  std::size_t n_max;
  double weight_normalizer;  // sum of 1/k over the k actually used
  AscltScheme scheme;
  std::size_t terms;  // number of k used
};

double harmonic_number(std::size_t n);
std::vector<std::size_t> divisors(std::size_t n);

// Minimum number of divisors of N_grid for the exact-divisor scheme.
inline constexpr std::size_t kMinDivisors = 12;

// sum_{k<=n_max} (1/k) phi(k^-HK B_k) / sum_{k<=n_max} 1/k along one path
// sampled on the integer times 1..n_max.
class BifBmAsclt {
 public:
  BifBmAsclt(const BifBmParams& params, std::size_t n_max,
             std::size_t cap = kDefaultCap);

  AscltReport run(const TestFunction& phi, std::uint64_t master_seed,
                  std::uint64_t path_index = 0) const;

 private:
  GridSampler sampler_;
  std::size_t n_max_;
};

AscltReport asclt_bifbm(const BifBmParams& params, std::size_t n_max,
                        const TestFunction& phi, std::uint64_t master_seed,
                        std::uint64_t path_index = 0,
                        std::size_t cap = kDefaultCap);

// Log-average of phi(V_k) along one path sampled on {i / N_grid}. With the
// exact-divisor scheme only k | N_grid are used and V_k is exact; the
// snapped-grid scheme uses every k <= N_grid, reading B at the grid point
// nearest to each i/k.
class VnAsclt {
 public:
  VnAsclt(const BifBmParams& params, std::size_t n_grid, AscltScheme scheme,
          std::size_t cap = kDefaultCap);

  const std::vector<std::size_t>& resolutions() const noexcept { return ks_; }

  // V_k for every k in resolutions(), same order.
  std::vector<double> vk_values(std::uint64_t master_seed,
                                std::uint64_t path_index = 0) const;

  AscltReport run(const TestFunction& phi, std::uint64_t master_seed,
                  std::uint64_t path_index = 0) const;

 private:
  BifBmParams params_;
  std::size_t n_grid_;
  AscltScheme scheme_;
  std::vector<std::size_t> ks_;
  std::vector<double> var_prefix_;
  std::vector<double> diag_;
  GridSampler sampler_;
};

AscltReport asclt_vn(const BifBmParams& params, std::size_t n_grid,
                     const TestFunction& phi, std::uint64_t master_seed,
                     AscltScheme scheme = AscltScheme::kExactDivisor,
                     std::uint64_t path_index = 0,
                     std::size_t cap = kDefaultCap);

}  // namespace bifbm

#endif  // BIFBM_MCVERIFY_HPP_
