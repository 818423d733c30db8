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

#include "bifbm/rng.hpp"

#include <cmath>
#include <numbers>

namespace bifbm {

namespace {

constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;

// Uniform on the open interval (0,1) from the top 53 bits.
double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t path_key(std::uint64_t master_seed,
                       std::uint64_t path_index) noexcept {
  return mix64(mix64(master_seed) + 0x9E3779B97F4A7C15ULL * (path_index + 1));
}

PhiloxCounter philox4x32_10(PhiloxCounter ctr, std::uint64_t key) noexcept {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

void NormalStream::fill(std::span<double> out,
                        std::uint64_t offset) const noexcept {
  std::size_t i = 0;
  std::uint64_t index = offset;
  while (i < out.size()) {
    const std::uint64_t block = index / 2;
    const PhiloxCounter r = philox4x32_10(
        {static_cast<std::uint32_t>(block),
         static_cast<std::uint32_t>(block >> 32), 0u, 0u},
        key_);
    const double u1 =
        open_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
    const double u2 =
        open_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    if (index % 2 == 0) {
      out[i++] = radius * std::cos(angle);
      ++index;
      if (i == out.size()) break;
    }
    out[i++] = radius * std::sin(angle);
    ++index;
  }
}

}  // namespace bifbm
