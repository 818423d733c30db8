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

// Covariance kernel of bifractional Brownian motion and the correlation
// functions of its unit-spaced increments.
//
// For parameters H in (0,1), K in (0,1] the process B has covariance
//
//   R(s,t) = 2^-K ((t^2H + s^2H)^K - |t-s|^2HK).
//
// The increments Y_i = B_{i+1} - B_i have covariance
//
//   theta(i,j) = 2^-K (gamma(i,j) + rho(i-j))
//
// where rho is the stationary (fractional Brownian) part with exponent
// 2HK and gamma is a non-stationary correction that vanishes at K = 1.

#ifndef BIFBM_KERNEL_HPP_
#define BIFBM_KERNEL_HPP_

#include <cstdint>
#include <string_view>

namespace bifbm {

class BifBmParams {
 public:
  // Throws DomainError naming "H" or "K" unless 0 < H < 1 and 0 < K <= 1.
  BifBmParams(double H, double K);

  double H() const noexcept { return h_; }
  double K() const noexcept { return k_; }
  double hk() const noexcept { return h_ * k_; }

  friend bool operator==(const BifBmParams&, const BifBmParams&) = default;

 private:
  double h_;
  double k_;
};

enum class RegimeTag { kSubHalf, kMidRange, kThreeQuarters, kSupercritical };

// Tolerance used to decide hk == 3/4.
inline constexpr double kThreeQuartersTol = 1e-12;

// Berry-Esseen rate regime, a function of hk alone.
struct RateRegime {
  RegimeTag tag;
  std::string_view description;

  // The rate sequence of the regime at resolution n: n^-1/2, n^(2HK-3/2) or
  // (log n)^-1/2. Throws DomainError for kSupercritical, and for
  // kThreeQuarters when n < 2.
  double rate(double hk, std::uint64_t n) const;
};

RateRegime classify_regime(const BifBmParams& params);
std::string_view to_string(RegimeTag tag);

// R(s,t). Throws DomainError on negative or non-finite times.
double cov(const BifBmParams& params, double s, double t);

// E[(B_b - B_a)(B_d - B_c)] for 0 <= a <= b, 0 <= c <= d.
double increment_inner(const BifBmParams& params, double a, double b, double c,
                       double d);

// |r+1|^2HK + |r-1|^2HK - 2|r|^2HK. Evaluated through its binomial series in
// 1/|r| once |r| is large enough for the direct form to cancel badly.
double rho(const BifBmParams& params, std::int64_t r);

// The four-term non-stationary correction. Always <= 0; exactly 0 at K = 1.
double gamma_fn(const BifBmParams& params, std::uint64_t i, std::uint64_t j);

double theta(const BifBmParams& params, std::uint64_t i, std::uint64_t j);

// (1/8) sum_{r in Z} rho(r)^2 for hk < 3/4. The sum runs explicitly up to a
// cutoff R and the remainder is the asymptotic expansion of rho^2 summed
// term-by-term with Hurwitz zeta values; R grows until the first omitted
// expansion term, times a safety factor of 4, is below rel_tol times the
// total.
double sigma_sq(const BifBmParams& params, double rel_tol = 1e-12);

// Log-density constant lim (1/(8 log n)) sum_{|r|<n} rho(r)^2 at hk = 3/4,
// i.e. 9/64. Stands in for sigma^2 in the n log n variance normalisation
// because the series defining sigma^2 diverges there.
double log_sigma_sq_threequarters();

namespace detail {

// Hurwitz zeta sum_{k>=0} (q+k)^-s for s > 1, q >= 1.
double hurwitz_zeta(double s, double q);

// Above this index gamma is evaluated in extended precision.
inline constexpr std::uint64_t kExtendedPrecisionIndex = 10000;

// i^2H and the forward difference (i+1)^2H - i^2H computed without
// cancellation. Shared by gamma_fn and the Gram builder so both produce
// identical bits.
template <class Real>
struct PowerStep {
  Real power;
  Real step;
};

PowerStep<double> power_step(double two_h, std::uint64_t i);
PowerStep<long double> power_step_ext(long double two_h, std::uint64_t i);

// (p_i + d_i + q)^K - (p_i + q)^K.
double shifted_power_diff(double p_i, double d_i, double q, double K);
long double shifted_power_diff_ext(long double p_i, long double d_i,
                                   long double q, long double K);

}  // namespace detail

}  // namespace bifbm

#endif  // BIFBM_KERNEL_HPP_
