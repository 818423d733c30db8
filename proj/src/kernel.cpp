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

#include "bifbm/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "bifbm/errors.hpp"

namespace bifbm {

namespace {

// |r| at and above this uses the series form of rho.
constexpr std::int64_t kRhoSeriesThreshold = 8;

void check_time(const char* name, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError(name, "time must be finite and nonnegative");
  }
}

double pow_nonneg(double x, double e) { return x == 0.0 ? 0.0 : std::pow(x, e); }

// (1+x)^a + (1-x)^a - 2 = 2 sum_{k>=1} C(a,2k) x^2k for |x| < 1.
double even_binomial_series(double a, double x) {
  const double x2 = x * x;
  double coef = 1.0;  // C(a, m)
  double xpow = 1.0;
  double sum = 0.0;
  for (int m = 1; m <= 80; ++m) {
    coef *= (a - (m - 1)) / m;
    if (m % 2 == 1) continue;
    xpow *= x2;
    const double term = coef * xpow;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    if (coef == 0.0) break;
  }
  return 2.0 * sum;
}

// C(a, 2k) for k = 1..count.
std::vector<double> even_binomials(double a, int count) {
  std::vector<double> out;
  double coef = 1.0;
  for (int m = 1; m <= 2 * count; ++m) {
    coef *= (a - (m - 1)) / m;
    if (m % 2 == 0) out.push_back(coef);
  }
  return out;
}

template <class Real>
Real gamma_canonical(Real two_h, Real K, std::uint64_t lo, std::uint64_t hi,
                     detail::PowerStep<Real> (*ps)(Real, std::uint64_t),
                     Real (*diff)(Real, Real, Real, Real)) {
  const auto row = ps(two_h, lo);
  const auto col = ps(two_h, hi);
  const auto col_next = ps(two_h, hi + 1);
  return diff(row.power, row.step, col_next.power, K) -
         diff(row.power, row.step, col.power, K);
}

}  // namespace

BifBmParams::BifBmParams(double H, double K) : h_(H), k_(K) {
  if (!std::isfinite(H) || H <= 0.0 || H >= 1.0) {
    throw DomainError("H", "must lie in (0,1)");
  }
  if (!std::isfinite(K) || K <= 0.0 || K > 1.0) {
    throw DomainError("K", "must lie in (0,1]");
  }
}

RateRegime classify_regime(const BifBmParams& params) {
  const double hk = params.hk();
  if (std::abs(hk - 0.75) <= kThreeQuartersTol) {
    return {RegimeTag::kThreeQuarters, "(log n)^(-1/2)"};
  }
  if (hk <= 0.5) return {RegimeTag::kSubHalf, "n^(-1/2)"};
  if (hk < 0.75) return {RegimeTag::kMidRange, "n^(2HK-3/2)"};
  return {RegimeTag::kSupercritical, "none"};
}

std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::kSubHalf:
      return "SubHalf";
    case RegimeTag::kMidRange:
      return "MidRange";
    case RegimeTag::kThreeQuarters:
      return "ThreeQuarters";
    case RegimeTag::kSupercritical:
      return "Supercritical";
  }
  return "?";
}

double RateRegime::rate(double hk, std::uint64_t n) const {
  if (n == 0) throw DomainError("n", "must be positive");
  const double dn = static_cast<double>(n);
  switch (tag) {
    case RegimeTag::kSubHalf:
      return 1.0 / std::sqrt(dn);
    case RegimeTag::kMidRange:
      return std::pow(dn, 2.0 * hk - 1.5);
    case RegimeTag::kThreeQuarters:
      if (n < 2) throw DomainError("n", "log-rate needs n >= 2");
      return 1.0 / std::sqrt(std::log(dn));
    case RegimeTag::kSupercritical:
      break;
  }
  throw DomainError("hk", "no Berry-Esseen rate for hk > 3/4");
}

double cov(const BifBmParams& params, double s, double t) {
  check_time("s", s);
  check_time("t", t);
  if (s == 0.0 || t == 0.0) return 0.0;
  const double two_h = 2.0 * params.H();
  const double K = params.K();
  const double sum = pow_nonneg(t, two_h) + pow_nonneg(s, two_h);
  const double lead = pow_nonneg(sum, K);
  const double gap = pow_nonneg(std::abs(t - s), two_h * K);
  return std::exp2(-K) * (lead - gap);
}

double increment_inner(const BifBmParams& params, double a, double b, double c,
                       double d) {
  check_time("a", a);
  check_time("b", b);
  check_time("c", c);
  check_time("d", d);
  if (a > b) throw DomainError("a", "interval endpoints out of order (a > b)");
  if (c > d) throw DomainError("c", "interval endpoints out of order (c > d)");
  return cov(params, b, d) - cov(params, b, c) - cov(params, a, d) +
         cov(params, a, c);
}

double rho(const BifBmParams& params, std::int64_t r) {
  const double a = 2.0 * params.hk();
  const std::uint64_t ar = r < 0 ? -static_cast<std::uint64_t>(r)
                                 : static_cast<std::uint64_t>(r);
  if (ar == 0) return 2.0;
  const double x = static_cast<double>(ar);
  if (ar < static_cast<std::uint64_t>(kRhoSeriesThreshold)) {
    if (a >= 0.5) {
      return std::pow(x + 1.0, a) + pow_nonneg(x - 1.0, a) - 2.0 * std::pow(x, a);
    }
    // x^a [((1 + 1/x)^a - 1) + ((1 - 1/x)^a - 1)] keeps small a accurate.
    return std::pow(x, a) * (std::expm1(a * std::log1p(1.0 / x)) +
                             std::expm1(a * std::log1p(-1.0 / x)));
  }
  return std::pow(x, a) * even_binomial_series(a, 1.0 / x);
}

namespace detail {

PowerStep<double> power_step(double two_h, std::uint64_t i) {
  if (i == 0) return {0.0, 1.0};
  const double x = static_cast<double>(i);
  const double p = std::pow(x, two_h);
  return {p, p * std::expm1(two_h * std::log1p(1.0 / x))};
}

PowerStep<long double> power_step_ext(long double two_h, std::uint64_t i) {
  if (i == 0) return {0.0L, 1.0L};
  const long double x = static_cast<long double>(i);
  const long double p = std::pow(x, two_h);
  return {p, p * std::expm1(two_h * std::log1p(1.0L / x))};
}

double shifted_power_diff(double p_i, double d_i, double q, double K) {
  const double base = p_i + q;
  if (base == 0.0) return std::pow(d_i, K);
  return std::pow(base, K) * std::expm1(K * std::log1p(d_i / base));
}

long double shifted_power_diff_ext(long double p_i, long double d_i,
                                   long double q, long double K) {
  const long double base = p_i + q;
  if (base == 0.0L) return std::pow(d_i, K);
  return std::pow(base, K) * std::expm1(K * std::log1p(d_i / base));
}

double hurwitz_zeta(double s, double q) {
  // Euler-Maclaurin after a few explicit terms. B_2j / (2j)!.
  static constexpr std::array<double, 8> kBernoulliOverFactorial = {
      1.0 / 12.0,
      -1.0 / 720.0,
      1.0 / 30240.0,
      -1.0 / 1209600.0,
      1.0 / 47900160.0,
      -691.0 / 1307674368000.0,
      1.0 / 74724249600.0,
      -3617.0 / 10670622842880000.0};
  constexpr int kDirect = 8;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(q + k, -s);
  const double w = q + kDirect;
  const double w_pow = std::pow(w, -s);
  sum += w * w_pow / (s - 1.0) + 0.5 * w_pow;
  double rising = s;  // s (s+1) ... (s+2j-2)
  double w_term = w_pow / w;
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const double term = kBernoulliOverFactorial[j] * rising * w_term;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    w_term /= w * w;
  }
  return sum;
}

}  // namespace detail

double gamma_fn(const BifBmParams& params, std::uint64_t i, std::uint64_t j) {
  if (params.K() == 1.0) return 0.0;
  const std::uint64_t lo = std::min(i, j);
  const std::uint64_t hi = std::max(i, j);
  if (hi <= detail::kExtendedPrecisionIndex) {
    return gamma_canonical<double>(2.0 * params.H(), params.K(), lo, hi,
                                   &detail::power_step,
                                   &detail::shifted_power_diff);
  }
  return static_cast<double>(gamma_canonical<long double>(
      2.0L * params.H(), params.K(), lo, hi, &detail::power_step_ext,
      &detail::shifted_power_diff_ext));
}

double theta(const BifBmParams& params, std::uint64_t i, std::uint64_t j) {
  const auto lag = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j);
  return std::exp2(-params.K()) * (gamma_fn(params, i, j) + rho(params, lag));
}

double sigma_sq(const BifBmParams& params, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw DomainError("rel_tol", "must lie in (0,1)");
  }
  const auto regime = classify_regime(params).tag;
  if (regime == RegimeTag::kThreeQuarters ||
      regime == RegimeTag::kSupercritical) {
    throw DomainError("hk", "sum of rho^2 diverges for hk >= 3/4");
  }
  const double a = 2.0 * params.hk();

  // rho(r)^2 = 4 r^2a sum_{m>=2} e_m r^-2m with e_m = sum_k C(a,2k) C(a,2(m-k)).
  constexpr int kTerms = 40;
  const auto c = even_binomials(a, kTerms);
  std::vector<double> e(kTerms + 1, 0.0);
  for (int m = 2; m <= kTerms; ++m) {
    for (int k = 1; k < m; ++k) e[m] += c[k - 1] * c[m - k - 1];
  }

  long double head = 0.0L;
  std::int64_t done = 0;
  for (std::int64_t cutoff = 64;; cutoff *= 4) {
    for (std::int64_t r = done + 1; r <= cutoff; ++r) {
      const double v = rho(params, r);
      head += static_cast<long double>(v) * v;
    }
    done = cutoff;

    const double q = static_cast<double>(cutoff + 1);
    double tail = 0.0;
    double omitted = 0.0;
    int m = 2;
    for (; m <= kTerms; ++m) {
      const double s = 2.0 * m - 2.0 * a;
      const double term = 4.0 * e[m] * detail::hurwitz_zeta(s, q);
      tail += term;
      if (std::abs(term) <= 1e-3 * rel_tol * std::abs(tail) && m > 3) break;
    }
    if (m < kTerms) {
      const double s = 2.0 * (m + 1) - 2.0 * a;
      omitted = 4.0 * std::abs(e[m + 1]) * detail::hurwitz_zeta(s, q);
    } else {
      omitted = std::abs(tail);
    }

    const double total = 4.0 + 2.0 * static_cast<double>(head + tail);
    if (4.0 * 2.0 * omitted <= rel_tol * total || cutoff > (1 << 22)) {
      return total / 8.0;
    }
  }
}

double log_sigma_sq_threequarters() {
  constexpr double kHk = 0.75;
  constexpr double kLead = 2.0 * kHk * (2.0 * kHk - 1.0);
  return 2.0 * kLead * kLead / 8.0;
}

}  // namespace bifbm
