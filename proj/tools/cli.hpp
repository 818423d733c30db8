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

// The bifbm command-line front end, split out of main() so that tests can
// drive it in-process.

#ifndef BIFBM_TOOLS_CLI_HPP_
#define BIFBM_TOOLS_CLI_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace bifbm::cli {

enum class Command { kKernel, kRateTable, kMc, kAsclt, kSample };
enum class Format { kCsv, kJson };

std::string_view to_string(Command command);
std::string_view to_string(Format format);

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitNumeric = 4;

struct RunConfig {
  Command command = Command::kKernel;
  double H = 0.5;
  double K = 1.0;
  std::size_t n = 0;
  std::vector<std::size_t> n_list;
  std::size_t m = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  Format format = Format::kJson;
  std::string out;  // empty means stdout
  std::string scheme = "exact-divisor";
  std::size_t cap = 0;  // 0 means BIFBM_CAP or the library default
  bool deterministic = false;
  std::string plot_data;

  // kernel
  std::vector<std::array<double, 2>> cov_points;
  std::optional<std::array<std::int64_t, 2>> rho_range;
  std::vector<std::array<std::uint64_t, 2>> gamma_points;
  std::vector<std::array<std::uint64_t, 2>> theta_points;

  // mc
  std::string dump;

  // sample
  std::size_t paths = 1;

  // asclt
  std::string mode = "bifbm";
  std::string phi = "cos";
  std::size_t reps = 16;
  double tol = 0.15;

  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& config);
void from_json(const nlohmann::json& j, RunConfig& config);

// Parses "A..B" into an inclusive integer range.
std::array<std::int64_t, 2> parse_range(std::string_view text);

// Resolves the effective capacity: explicit cap, else BIFBM_CAP, else the
// library default.
std::size_t effective_cap(const RunConfig& config);

// Result of argument parsing: either a config to run or an exit code (help
// or a parse error, already reported on err).
struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = kExitOk;
};

ParseOutcome parse_args(int argc, const char* const* argv, std::ostream& out,
                        std::ostream& err);

// Runs one command, writing its table to out (or config.out) and
// diagnostics to err. Library errors are mapped to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args followed by run.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

// CSV field quoting per RFC 4180.
std::string csv_field(std::string_view text);
// Shortest round-trip decimal form with a dot separator.
std::string format_double(double value);

}  // namespace bifbm::cli

#endif  // BIFBM_TOOLS_CLI_HPP_
