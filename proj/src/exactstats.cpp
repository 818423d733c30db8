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

#include "bifbm/exactstats.hpp"

#include <algorithm>
#include <cmath>

namespace bifbm {

namespace {

constexpr Eigen::Index kPanelRows = 256;

// Streams the upper triangle of Theta row by row. Entries are bit-identical
// to theta(params, i, j).
class ThetaRows {
 public:
  ThetaRows(const BifBmParams& params, std::size_t n)
      : params_(params), n_(n), scale_(std::exp2(-params.K())) {
    const double two_h = 2.0 * params.H();
    powers_.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      powers_.push_back(detail::power_step(two_h, i));
    }
    rho_.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      rho_.push_back(rho(params, -static_cast<std::int64_t>(r)));
    }
  }

  // out[j - i] = theta(i, j) for j = i..n-1.
  void row(std::size_t i, double* out) const {
    const double K = params_.K();
    const bool fbm = K == 1.0;
    const std::size_t fast_end =
        std::min<std::size_t>(n_, detail::kExtendedPrecisionIndex + 1);
    const auto& pi = powers_[i];
    double prev = fbm ? 0.0
                      : detail::shifted_power_diff(pi.power, pi.step,
                                                   powers_[i].power, K);
    for (std::size_t j = i; j < fast_end; ++j) {
      double g = 0.0;
      if (!fbm) {
        const double next = detail::shifted_power_diff(
            pi.power, pi.step, powers_[j + 1].power, K);
        g = next - prev;
        prev = next;
      }
      out[j - i] = scale_ * (g + rho_[j - i]);
    }
    for (std::size_t j = std::max(i, fast_end); j < n_; ++j) {
      out[j - i] = theta(params_, i, j);
    }
  }

 private:
  BifBmParams params_;
  std::size_t n_;
  double scale_;
  std::vector<detail::PowerStep<double>> powers_;
  std::vector<double> rho_;
};

void check_n(std::size_t n, std::size_t cap) {
  if (n == 0) throw DomainError("n", "must be positive");
  check_cap(n, cap);
}

}  // namespace

IncrementGram build_gram(const BifBmParams& params, std::size_t n,
                         std::size_t cap) {
  check_n(n, cap);
  const ThetaRows rows(params, n);
  Eigen::MatrixXd m(n, n);
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows.row(i, buf.data());
    for (std::size_t j = i; j < n; ++j) {
      const double v = buf[j - i];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return IncrementGram(params, std::move(m));
}

double var_zn(const IncrementGram& gram) {
  return 2.0 * gram.entries().squaredNorm();
}

namespace detail {

double trace_fourth_power(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  long double total = 0.0L;
  Eigen::MatrixXd panel;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kPanelRows) {
    const Eigen::Index rb = std::min(kPanelRows, n - r0);
    // Rows r0..r0+rb of M^2 restricted to columns >= r0.
    panel.noalias() = m.middleCols(r0, rb).transpose() * m.rightCols(n - r0);
    const double diag = panel.leftCols(rb).squaredNorm();
    const double off = panel.rightCols(n - r0 - rb).squaredNorm();
    total += static_cast<long double>(diag) + 2.0L * off;
  }
  return static_cast<double>(total);
}

}  // namespace detail

double a_n(const IncrementGram& gram) {
  const double n = static_cast<double>(gram.n());
  return detail::trace_fourth_power(gram.entries()) / (n * n);
}

namespace {

double stein_from(std::size_t n, double a, double var) {
  const double dn = static_cast<double>(n);
  return std::sqrt(8.0 * dn * dn * a) / var;
}

}  // namespace

double stein_bound(const IncrementGram& gram) {
  return stein_from(gram.n(), a_n(gram), var_zn(gram));
}

std::vector<double> var_zn_prefix(const BifBmParams& params, std::size_t n_max,
                                  std::size_t cap) {
  check_n(n_max, cap);
  const ThetaRows rows(params, n_max);
  std::vector<long double> column(n_max, 0.0L);
  std::vector<double> buf(n_max);
  for (std::size_t i = 0; i < n_max; ++i) {
    rows.row(i, buf.data());
    column[i] += static_cast<long double>(buf[0]) * buf[0];
    for (std::size_t j = i + 1; j < n_max; ++j) {
      column[j] += 2.0L * buf[j - i] * buf[j - i];
    }
  }
  std::vector<double> out(n_max);
  long double running = 0.0L;
  for (std::size_t k = 0; k < n_max; ++k) {
    running += column[k];
    out[k] = static_cast<double>(2.0L * running);
  }
  return out;
}

double variance_ratio_of(const BifBmParams& params, std::size_t n,
                         double var) {
  const auto tag = classify_regime(params).tag;
  const double dn = static_cast<double>(n);
  const double scale = std::pow(4.0, 2.0 - params.K());
  switch (tag) {
    case RegimeTag::kSubHalf:
    case RegimeTag::kMidRange:
      return var / (scale * dn * sigma_sq(params));
    case RegimeTag::kThreeQuarters:
      if (n < 2) throw DomainError("n", "n log n normalisation needs n >= 2");
      return var / (scale * log_sigma_sq_threequarters() * dn * std::log(dn));
    case RegimeTag::kSupercritical:
      break;
  }
  throw DomainError("hk", "variance normalisation undefined for hk > 3/4");
}

double variance_ratio(const BifBmParams& params, std::size_t n,
                      std::size_t cap) {
  if (classify_regime(params).tag == RegimeTag::kSupercritical) {
    throw DomainError("hk", "variance normalisation undefined for hk > 3/4");
  }
  return variance_ratio_of(params, n, var_zn_prefix(params, n, cap).back());
}

QuadVarReport quadvar_report(const BifBmParams& params, std::size_t n,
                             std::size_t cap) {
  const RateRegime regime = classify_regime(params);
  if (regime.tag == RegimeTag::kSupercritical) {
    throw DomainError("hk", "no Berry-Esseen rate for hk > 3/4");
  }
  if (regime.tag == RegimeTag::kThreeQuarters && n < 2) {
    throw DomainError("n", "log-rate needs n >= 2 at hk = 3/4");
  }
  const IncrementGram gram = build_gram(params, n, cap);
  QuadVarReport report{params, n, 0.0, 0.0, 0.0, 0.0, regime, 0.0};
  report.var_zn = var_zn(gram);
  report.a_n = a_n(gram);
  report.stein_bound = stein_from(n, report.a_n, report.var_zn);
  report.variance_ratio = variance_ratio_of(params, n, report.var_zn);
  report.normalized_bound =
      report.stein_bound / regime.rate(params.hk(), n);
  return report;
}

std::vector<QuadVarReport> rate_table(const BifBmParams& params,
                                      std::span<const std::size_t> n_values,
                                      std::size_t cap) {
  if (n_values.empty()) throw DomainError("n_values", "must be nonempty");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1]) {
      throw DomainError("n_values", "must be strictly ascending");
    }
  }
  std::vector<QuadVarReport> out;
  out.reserve(n_values.size());
  for (std::size_t n : n_values) out.push_back(quadvar_report(params, n, cap));
  return out;
}

double cross_gram(const BifBmParams& params, std::size_t k, std::size_t l,
                  std::size_t cap) {
  if (k == 0) throw DomainError("k", "must be positive");
  if (k > l) throw DomainError("k", "cross_gram requires k <= l");
  check_cap(l, cap);
  const auto var = var_zn_prefix(params, l, cap);
  const double dk = static_cast<double>(k);
  const double dl = static_cast<double>(l);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = static_cast<double>(i) / dk;
    const double b = static_cast<double>(i + 1) / dk;
    for (std::size_t j = 0; j < l; ++j) {
      const double c = static_cast<double>(j) / dl;
      const double d = static_cast<double>(j + 1) / dl;
      const double v = increment_inner(params, a, b, c, d);
      sum += static_cast<long double>(v) * v;
    }
  }
  const double scale = std::pow(dk * dl, 2.0 * params.hk()) /
                       std::sqrt(var[k - 1] * var[l - 1]);
  return scale * static_cast<double>(sum);
}

}  // namespace bifbm
