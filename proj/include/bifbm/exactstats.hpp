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

// Exact finite-n statistics of the normalised quadratic variation
//
//   Z_n = sum_{i<n} [n^2HK (B_{(i+1)/n} - B_{i/n})^2 - theta(i,i)],
//   V_n = Z_n / sqrt(Var Z_n),
//
// all expressed through the increment Gram matrix Theta (entries
// theta(i,j), i,j < n):
//
//   Var Z_n = 2 |Theta|_F^2
//   A(n)    = n^-2 tr(Theta^4)
//   d_Kol(V_n, N(0,1)) <= sqrt(8 n^2 A(n)) / Var Z_n.

#ifndef BIFBM_EXACTSTATS_HPP_
#define BIFBM_EXACTSTATS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/errors.hpp"
#include "bifbm/kernel.hpp"

namespace bifbm {

class IncrementGram {
 public:
  IncrementGram(BifBmParams params, Eigen::MatrixXd entries)
      : params_(params), entries_(std::move(entries)) {}

  const BifBmParams& params() const noexcept { return params_; }
  std::size_t n() const noexcept {
    return static_cast<std::size_t>(entries_.rows());
  }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  BifBmParams params_;
  Eigen::MatrixXd entries_;
};

struct QuadVarReport {
  BifBmParams params;
  std::size_t n;
  double var_zn;
  double a_n;
  double stein_bound;
  double variance_ratio;
  RateRegime regime;
  double normalized_bound;
};

// Dense symmetric Theta, each upper-triangle entry computed once. Throws
// CapacityError if n > cap, DomainError if n == 0.
IncrementGram build_gram(const BifBmParams& params, std::size_t n,
                         std::size_t cap = kDefaultCap);

double var_zn(const IncrementGram& gram);

// n^-2 tr(Theta^4), accumulated panel by panel over the upper block
// triangle of Theta^2 so only one row panel of the product is alive.
double a_n(const IncrementGram& gram);

double stein_bound(const IncrementGram& gram);

// Var Z_k for k = 1..n_max (element k-1) in O(n_max^2) time and O(n_max)
// memory; no Gram matrix is stored.
std::vector<double> var_zn_prefix(const BifBmParams& params, std::size_t n_max,
                                  std::size_t cap = kDefaultCap);

// Var Z_n / (4^(2-K) n sigma^2) for hk < 3/4, and
// Var Z_n / (4^(2-K) c n log n) with c = 9/64 at hk = 3/4.
double variance_ratio(const BifBmParams& params, std::size_t n,
                      std::size_t cap = kDefaultCap);

// Same normalisation applied to a precomputed variance.
double variance_ratio_of(const BifBmParams& params, std::size_t n,
                         double var_zn);

QuadVarReport quadvar_report(const BifBmParams& params, std::size_t n,
                             std::size_t cap = kDefaultCap);

// One report per n. n_values must be nonempty and strictly ascending.
std::vector<QuadVarReport> rate_table(const BifBmParams& params,
                                      std::span<const std::size_t> n_values,
                                      std::size_t cap = kDefaultCap);

// <g_k, g_l> = (kl)^2HK / sqrt(Var Z_k Var Z_l)
//              * sum_{i<k, j<l} <delta_{i/k}, delta_{j/l}>^2,
// which equals E[V_k V_l] / 2. Requires 1 <= k <= l <= cap.
double cross_gram(const BifBmParams& params, std::size_t k, std::size_t l,
                  std::size_t cap = kDefaultCap);

namespace detail {
// tr(M^4) for symmetric M.
double trace_fourth_power(const Eigen::MatrixXd& m);
}  // namespace detail

}  // namespace bifbm

#endif  // BIFBM_EXACTSTATS_HPP_
