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

// Counter-based normal variates. Every path owns an independent Philox4x32-10
// key derived from (master_seed, path_index); the k-th pair of normals of a
// path comes from encrypting counter k, so any draw can be regenerated
// without replaying earlier ones.

#ifndef BIFBM_RNG_HPP_
#define BIFBM_RNG_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace bifbm {

inline constexpr std::string_view kGeneratorName =
    "philox4x32-10/box-muller/splitmix64-key";

// SplitMix64 finaliser; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Per-path key. For fixed master_seed this is injective in path_index.
std::uint64_t path_key(std::uint64_t master_seed,
                       std::uint64_t path_index) noexcept;

using PhiloxCounter = std::array<std::uint32_t, 4>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, std::uint64_t key) noexcept;

class NormalStream {
 public:
  NormalStream(std::uint64_t master_seed, std::uint64_t path_index) noexcept
      : key_(path_key(master_seed, path_index)) {}

  // Fills out with normals number offset, offset+1, ... of this stream.
  void fill(std::span<double> out, std::uint64_t offset = 0) const noexcept;

 private:
  std::uint64_t key_;
};

}  // namespace bifbm

#endif  // BIFBM_RNG_HPP_
