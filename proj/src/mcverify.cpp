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
#include <atomic>
#include <charconv>
#include <cmath>
#include <numbers>
#include <thread>

#include "bifbm/exactstats.hpp"

namespace bifbm {

namespace {

constexpr std::size_t kChunk = CorrelatedNormal::kBlockWidth * 4;

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> uniform_grid(std::size_t n_grid) {
  std::vector<double> grid(n_grid + 1);
  for (std::size_t i = 0; i <= n_grid; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(n_grid);
  }
  return grid;
}

std::vector<double> integer_grid(std::size_t n_max) {
  if (n_max == 0) throw DomainError("n_max", "must be positive");
  std::vector<double> grid(n_max);
  for (std::size_t k = 0; k < n_max; ++k) grid[k] = static_cast<double>(k + 1);
  return grid;
}

void require_clt_regime(const BifBmParams& params) {
  if (classify_regime(params).tag == RegimeTag::kSupercritical) {
    throw DomainError("hk", "V_n is not asymptotically normal for hk > 3/4");
  }
}

// Weighted log-average with weights 1/k, summed in the order given.
AscltReport log_average(const TestFunction& phi,
                        std::span<const std::size_t> ks,
                        std::span<const double> values, AscltScheme scheme) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (std::size_t idx = 0; idx < ks.size(); ++idx) {
    const long double w = 1.0L / static_cast<long double>(ks[idx]);
    num += w * phi.phi(values[idx]);
    den += w;
  }
  return {phi.name,
          static_cast<double>(num / den),
          phi.target,
          ks.empty() ? 0 : ks.back(),
          static_cast<double>(den),
          scheme,
          ks.size()};
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_distance(std::span<const double> sorted_sample) {
  if (sorted_sample.empty()) throw DomainError("sample", "must be nonempty");
  if (!std::is_sorted(sorted_sample.begin(), sorted_sample.end())) {
    throw DomainError("sample", "must be sorted ascending");
  }
  const double m = static_cast<double>(sorted_sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    const double cdf = normal_cdf(sorted_sample[i]);
    const double above = static_cast<double>(i + 1) / m - cdf;
    const double below = cdf - static_cast<double>(i) / m;
    worst = std::max({worst, above, below});
  }
  return worst;
}

std::vector<double> vn_draws(const IncrementSampler& sampler, double var_zn,
                             std::uint64_t master_seed,
                             std::uint64_t first_index, std::size_t count,
                             unsigned threads) {
  const std::size_t n = sampler.n();
  std::vector<double> diag(n);
  for (std::size_t k = 0; k < n; ++k) diag[k] = sampler.gram()(k, k);
  const double norm = std::sqrt(var_zn);

  std::vector<double> out(count);
  std::atomic<std::size_t> next_chunk{0};
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  auto worker = [&] {
    std::vector<double> buf(kChunk * n);
    for (std::size_t c = next_chunk++; c < chunks; c = next_chunk++) {
      const std::size_t start = c * kChunk;
      const std::size_t width = std::min(kChunk, count - start);
      sampler.draw_many(master_seed, first_index + start, width, buf);
      for (std::size_t p = 0; p < width; ++p) {
        const double* y = buf.data() + p * n;
        double z = 0.0;
        for (std::size_t k = 0; k < n; ++k) z += y[k] * y[k] - diag[k];
        out[start + p] = z / norm;
      }
    }
  };
  const unsigned workers =
      std::min<unsigned>(resolve_threads(threads),
                         static_cast<unsigned>(std::max<std::size_t>(chunks, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  return out;
}

EcdfSummary mc_vn_sample(const BifBmParams& params, std::size_t n,
                         std::size_t m, std::uint64_t master_seed,
                         const McOptions& options) {
  require_clt_regime(params);
  if (m < 100) throw DomainError("m", "Monte Carlo sample size must be >= 100");
  const IncrementSampler sampler(params, n, options.cap);
  const double var = var_zn(sampler.gram());
  auto sample = vn_draws(sampler, var, master_seed, 0, m, options.threads);
  std::sort(sample.begin(), sample.end());
  const double ks = ks_distance(sample);
  return {params, n, m, std::move(sample), ks};
}

TestFunction constant_function(double c) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), c);
  return {"const:" + std::string(buf, res.ptr), [c](double) { return c; }, c};
}

TestFunction cosine_function() {
  return {"cos", [](double x) { return std::cos(x); }, std::exp(-0.5)};
}

TestFunction sine_function() {
  return {"sin", [](double x) { return std::sin(x); }, 0.0};
}

TestFunction logistic_step_function(double slope) {
  return {"logistic",
          [slope](double x) { return 1.0 / (1.0 + std::exp(slope * x)); },
          0.5};
}

TestFunction clamped_square_function(double ceiling) {
  const double a = std::sqrt(ceiling);
  const double density = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
  const double inside = (2.0 * normal_cdf(a) - 1.0) - 2.0 * a * density;
  const double target = inside + ceiling * 2.0 * normal_cdf(-a);
  return {"clamp_sq",
          [ceiling](double x) { return std::min(x * x, ceiling); }, target};
}

TestFunction test_function_by_name(std::string_view name) {
  if (name == "cos") return cosine_function();
  if (name == "sin") return sine_function();
  if (name == "logistic") return logistic_step_function();
  if (name == "clamp_sq") return clamped_square_function();
  constexpr std::string_view kConst = "const:";
  if (name.starts_with(kConst)) {
    const auto text = name.substr(kConst.size());
    double c = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), c);
    if (res.ec == std::errc() && res.ptr == text.data() + text.size() &&
        std::isfinite(c)) {
      return constant_function(c);
    }
  }
  throw DomainError("phi", "unknown test function '" + std::string(name) + "'");
}

std::string_view to_string(AscltScheme scheme) {
  switch (scheme) {
    case AscltScheme::kExactDivisor:
      return "exact-divisor";
    case AscltScheme::kSnappedGrid:
      return "snapped-grid";
    case AscltScheme::kIntegerTimes:
      return "integer-times";
  }
  return "?";
}

AscltScheme parse_scheme(std::string_view text) {
  if (text == "exact-divisor") return AscltScheme::kExactDivisor;
  if (text == "snapped-grid") return AscltScheme::kSnappedGrid;
  if (text == "integer-times") return AscltScheme::kIntegerTimes;
  throw DomainError("scheme", "unknown scheme '" + std::string(text) + "'");
}

double harmonic_number(std::size_t n) {
  long double sum = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) sum += 1.0L / static_cast<long double>(k);
  return static_cast<double>(sum);
}

std::vector<std::size_t> divisors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

BifBmAsclt::BifBmAsclt(const BifBmParams& params, std::size_t n_max,
                       std::size_t cap)
    : sampler_(params, integer_grid(n_max), cap), n_max_(n_max) {}

AscltReport BifBmAsclt::run(const TestFunction& phi, std::uint64_t master_seed,
                            std::uint64_t path_index) const {
  const GridSample path = sampler_.draw(master_seed, path_index);
  const double hk = sampler_.params().hk();
  std::vector<std::size_t> ks(n_max_);
  std::vector<double> scaled(n_max_);
  for (std::size_t k = 1; k <= n_max_; ++k) {
    ks[k - 1] = k;
    scaled[k - 1] =
        path.values[k - 1] * std::pow(static_cast<double>(k), -hk);
  }
  return log_average(phi, ks, scaled, AscltScheme::kIntegerTimes);
}

AscltReport asclt_bifbm(const BifBmParams& params, std::size_t n_max,
                        const TestFunction& phi, std::uint64_t master_seed,
                        std::uint64_t path_index, std::size_t cap) {
  return BifBmAsclt(params, n_max, cap).run(phi, master_seed, path_index);
}

namespace {

std::vector<std::size_t> usable_resolutions(const BifBmParams& params,
                                            std::size_t n_grid,
                                            AscltScheme scheme,
                                            std::size_t cap) {
  require_clt_regime(params);
  if (n_grid == 0) throw DomainError("N_grid", "must be positive");
  check_cap(n_grid, cap);
  switch (scheme) {
    case AscltScheme::kExactDivisor: {
      auto ks = divisors(n_grid);
      if (ks.size() < kMinDivisors) {
        throw DomainError("N_grid",
                          std::to_string(n_grid) + " has only " +
                              std::to_string(ks.size()) +
                              " divisors; the exact-divisor scheme needs at "
                              "least " +
                              std::to_string(kMinDivisors));
      }
      return ks;
    }
    case AscltScheme::kSnappedGrid: {
      std::vector<std::size_t> ks(n_grid);
      for (std::size_t k = 0; k < n_grid; ++k) ks[k] = k + 1;
      return ks;
    }
    case AscltScheme::kIntegerTimes:
      break;
  }
  throw DomainError("scheme", "V_n harness supports exact-divisor or snapped-grid");
}

}  // namespace

VnAsclt::VnAsclt(const BifBmParams& params, std::size_t n_grid,
                 AscltScheme scheme, std::size_t cap)
    : params_(params),
      n_grid_(n_grid),
      scheme_(scheme),
      ks_(usable_resolutions(params, n_grid, scheme, cap)),
      var_prefix_(var_zn_prefix(params, ks_.back(), cap)),
      sampler_(params, uniform_grid(n_grid), cap) {
  diag_.resize(ks_.back());
  for (std::size_t i = 0; i < diag_.size(); ++i) diag_[i] = theta(params, i, i);
}

std::vector<double> VnAsclt::vk_values(std::uint64_t master_seed,
                                       std::uint64_t path_index) const {
  const GridSample path = sampler_.draw(master_seed, path_index);
  const double two_hk = 2.0 * params_.hk();
  std::vector<double> out;
  out.reserve(ks_.size());
  for (std::size_t k : ks_) {
    // Nearest grid index to i/k, rounding halves up; exact when k | N.
    auto snap = [&](std::size_t i) {
      return (2 * i * n_grid_ + k) / (2 * k);
    };
    const double scale = std::pow(static_cast<double>(k), two_hk);
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double dx = path.values[snap(i + 1)] - path.values[snap(i)];
      z += scale * dx * dx - diag_[i];
    }
    out.push_back(z / std::sqrt(var_prefix_[k - 1]));
  }
  return out;
}

AscltReport VnAsclt::run(const TestFunction& phi, std::uint64_t master_seed,
                         std::uint64_t path_index) const {
  const auto values = vk_values(master_seed, path_index);
  return log_average(phi, ks_, values, scheme_);
}

AscltReport asclt_vn(const BifBmParams& params, std::size_t n_grid,
                     const TestFunction& phi, std::uint64_t master_seed,
                     AscltScheme scheme, std::uint64_t path_index,
                     std::size_t cap) {
  return VnAsclt(params, n_grid, scheme, cap).run(phi, master_seed, path_index);
}

}  // namespace bifbm
