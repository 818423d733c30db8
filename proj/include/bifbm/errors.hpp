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

#ifndef BIFBM_ERRORS_HPP_
#define BIFBM_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bifbm {

// Default upper bound on matrix dimensions (Gram size, grid length).
inline constexpr std::size_t kDefaultCap = std::size_t{1} << 13;

// An argument is outside the mathematical domain of an operation.
// parameter() names the offending input so front ends can report it.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string parameter, const std::string& what)
      : std::domain_error(parameter + ": " + what),
        parameter_(std::move(parameter)) {}

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

// A requested dimension exceeds the configured cap.
class CapacityError : public std::length_error {
 public:
  CapacityError(std::size_t requested, std::size_t cap)
      : std::length_error("requested size " + std::to_string(requested) +
                          " exceeds cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

// Floating-point failure that indicates an upstream bug, e.g. a covariance
// matrix that cannot be factored even after the maximal jitter.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void check_cap(std::size_t requested, std::size_t cap) {
  if (requested > cap) throw CapacityError(requested, cap);
}

}  // namespace bifbm

#endif  // BIFBM_ERRORS_HPP_
