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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "bifbm/errors.hpp"
#include "bifbm/exactstats.hpp"
#include "bifbm/kernel.hpp"
#include "bifbm/mcverify.hpp"
#include "bifbm/rng.hpp"
#include "bifbm/sampler.hpp"

namespace bifbm::cli {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kKernelColumns = "function,x,y,value";
constexpr std::string_view kRateColumns =
    "n,var_zn,a_n,stein_bound,variance_ratio,regime,normalized_bound";
constexpr std::string_view kMcColumns =
    "n,m,ks_distance,stein_bound,ks_slack,mean,variance";
constexpr std::string_view kAscltColumns =
    "path_index,weighted_average,target,abs_error,pass";
constexpr std::string_view kSampleColumns = "path_index,i,increment,b";

// A rectangular result: fixed columns, one JSON scalar per cell.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<ojson>> rows;
};

// What a command produces: a table plus extra summary fields for JSON.
struct Document {
  Table table;
  ojson summary = ojson::object();
};

std::vector<std::string> split_columns(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = list.find(',', start);
    out.emplace_back(list.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string csv_cell(const ojson& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return csv_field(cell.get<std::string>());
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  if (cell.is_number_unsigned()) return std::to_string(cell.get<std::uint64_t>());
  if (cell.is_number_integer()) return std::to_string(cell.get<std::int64_t>());
  return format_double(cell.get<double>());
}

void write_csv(const Table& table, std::ostream& os) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << csv_field(table.columns[c]);
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << csv_cell(row[c]);
    }
    os << '\n';
  }
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson provenance(const RunConfig& config, const BifBmParams& params) {
  ojson p;
  p["software"] = "bifbm";
  p["version"] = BIFBM_VERSION;
  p["command"] = std::string(to_string(config.command));
  p["params"] = {{"H", params.H()}, {"K", params.K()}, {"hk", params.hk()}};
  p["seed"] = config.seed;
  p["generator"] = std::string(kGeneratorName);
  if (!config.deterministic) p["timestamp"] = utc_timestamp();
  return p;
}

void write_json(const RunConfig& config, const BifBmParams& params,
                const Document& doc, std::ostream& os) {
  ojson root;
  root["provenance"] = provenance(config, params);
  for (const auto& [key, value] : doc.summary.items()) root[key] = value;
  ojson rows = ojson::array();
  for (const auto& row : doc.table.rows) {
    ojson record;
    for (std::size_t c = 0; c < row.size(); ++c) {
      record[doc.table.columns[c]] = row[c];
    }
    rows.push_back(std::move(record));
  }
  root["rows"] = std::move(rows);
  os << root.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path, std::string_view flag) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw DomainError(std::string(flag), "cannot open '" + path + "' for writing");
  }
  return file;
}

// Runs body(i) for i < count on up to `threads` workers; results must be
// written to slots owned by i so the outcome is order independent.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Document cmd_kernel(const RunConfig& config, const BifBmParams& params) {
  Document doc;
  doc.table.columns = split_columns(kKernelColumns);
  auto& rows = doc.table.rows;
  for (const auto& [s, t] : config.cov_points) {
    rows.push_back({"cov", s, t, cov(params, s, t)});
  }
  if (config.rho_range) {
    const auto [lo, hi] = *config.rho_range;
    for (std::int64_t r = lo; r <= hi; ++r) {
      rows.push_back({"rho", r, nullptr, rho(params, r)});
    }
  }
  for (const auto& [i, j] : config.gamma_points) {
    rows.push_back({"gamma", i, j, gamma_fn(params, i, j)});
  }
  for (const auto& [i, j] : config.theta_points) {
    rows.push_back({"theta", i, j, theta(params, i, j)});
  }
  if (rows.empty()) {
    throw DomainError("query", "give at least one of --cov, --rho, --gamma, --theta");
  }
  return doc;
}

std::vector<std::size_t> requested_sizes(const RunConfig& config) {
  if (!config.n_list.empty()) return config.n_list;
  if (config.n > 0) return {config.n};
  throw DomainError("n-list", "give --n-list or --n");
}

Document cmd_rate_table(const RunConfig& config, const BifBmParams& params) {
  const auto sizes = requested_sizes(config);
  const auto reports = rate_table(params, sizes, effective_cap(config));
  Document doc;
  doc.table.columns = split_columns(kRateColumns);
  for (const auto& r : reports) {
    doc.table.rows.push_back({r.n, r.var_zn, r.a_n, r.stein_bound,
                              r.variance_ratio, std::string(to_string(r.regime.tag)),
                              r.normalized_bound});
  }
  if (!reports.empty()) {
    doc.summary["regime"] = std::string(to_string(reports.front().regime.tag));
    doc.summary["rate"] = reports.front().regime.description;
  }
  if (!config.plot_data.empty()) {
    auto file = open_output(config.plot_data, "plot-data");
    file << "# n stein_bound\n";
    for (const auto& r : reports) {
      file << r.n << ' ' << format_double(r.stein_bound) << '\n';
    }
  }
  return doc;
}

std::size_t required_n(const RunConfig& config) {
  if (config.n == 0) throw DomainError("n", "must be positive");
  return config.n;
}

Document cmd_mc(const RunConfig& config, const BifBmParams& params) {
  const std::size_t n = required_n(config);
  const std::size_t cap = effective_cap(config);
  const EcdfSummary summary =
      mc_vn_sample(params, n, config.m, config.seed, {config.threads, cap});
  const double bound = stein_bound(build_gram(params, n, cap));
  const double m = static_cast<double>(summary.m);
  const double slack = 3.0 * std::sqrt(std::log(2000.0) / (2.0 * m));
  double mean = 0.0;
  for (double v : summary.sample) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : summary.sample) var += (v - mean) * (v - mean);
  var /= m - 1.0;

  Document doc;
  doc.table.columns = split_columns(kMcColumns);
  doc.table.rows.push_back(
      {summary.n, summary.m, summary.ks_distance, bound, slack, mean, var});
  doc.summary["within_bound"] = summary.ks_distance <= bound + slack;

  if (!config.dump.empty()) {
    auto file = open_output(config.dump, "dump");
    file << "rank,v_n\n";
    for (std::size_t i = 0; i < summary.sample.size(); ++i) {
      file << i << ',' << format_double(summary.sample[i]) << '\n';
    }
  }
  if (!config.plot_data.empty()) {
    auto file = open_output(config.plot_data, "plot-data");
    file << "# v_n ecdf\n";
    for (std::size_t i = 0; i < summary.sample.size(); ++i) {
      file << format_double(summary.sample[i]) << ' '
           << format_double(static_cast<double>(i + 1) / m) << '\n';
    }
  }
  return doc;
}

Document cmd_asclt(const RunConfig& config, const BifBmParams& params) {
  const std::size_t n = required_n(config);
  if (config.reps == 0) throw DomainError("reps", "must be positive");
  if (!(config.tol > 0.0)) throw DomainError("tol", "must be positive");
  const std::size_t cap = effective_cap(config);
  const TestFunction phi = test_function_by_name(config.phi);

  std::vector<AscltReport> reports(config.reps);
  if (config.mode == "bifbm") {
    const BifBmAsclt harness(params, n, cap);
    parallel_for(config.reps, config.threads, [&](std::size_t rep) {
      reports[rep] = harness.run(phi, config.seed, rep);
    });
  } else if (config.mode == "vn") {
    const VnAsclt harness(params, n, parse_scheme(config.scheme), cap);
    parallel_for(config.reps, config.threads, [&](std::size_t rep) {
      reports[rep] = harness.run(phi, config.seed, rep);
    });
  } else {
    throw DomainError("mode", "must be 'bifbm' or 'vn'");
  }

  Document doc;
  doc.table.columns = split_columns(kAscltColumns);
  std::size_t passes = 0;
  for (std::size_t rep = 0; rep < reports.size(); ++rep) {
    const auto& r = reports[rep];
    const double err = std::abs(r.weighted_average - r.target);
    const bool pass = err <= config.tol;
    passes += pass ? 1 : 0;
    doc.table.rows.push_back(
        {static_cast<std::uint64_t>(rep), r.weighted_average, r.target, err, pass});
  }
  const auto& first = reports.front();
  doc.summary["mode"] = config.mode;
  doc.summary["phi"] = first.phi_name;
  doc.summary["target"] = first.target;
  doc.summary["scheme"] = std::string(to_string(first.scheme));
  doc.summary["n_max"] = first.n_max;
  doc.summary["terms"] = first.terms;
  doc.summary["weight_normalizer"] = first.weight_normalizer;
  doc.summary["tol"] = config.tol;
  doc.summary["reps"] = config.reps;
  doc.summary["pass_count"] = passes;

  if (!config.plot_data.empty()) {
    auto file = open_output(config.plot_data, "plot-data");
    file << "# path_index weighted_average\n";
    for (std::size_t rep = 0; rep < reports.size(); ++rep) {
      file << rep << ' ' << format_double(reports[rep].weighted_average) << '\n';
    }
  }
  return doc;
}

Document cmd_sample(const RunConfig& config, const BifBmParams& params) {
  const std::size_t n = required_n(config);
  if (config.paths == 0) throw DomainError("paths", "must be positive");
  const IncrementSampler sampler(params, n, effective_cap(config));
  std::vector<double> draws(config.paths * n);
  sampler.draw_many(config.seed, 0, config.paths, draws);

  Document doc;
  doc.table.columns = split_columns(kSampleColumns);
  std::ofstream plot;
  if (!config.plot_data.empty()) {
    plot = open_output(config.plot_data, "plot-data");
    plot << "# i b\n";
  }
  for (std::size_t p = 0; p < config.paths; ++p) {
    double b = 0.0;
    if (plot.is_open()) plot << (p ? "\n\n" : "") << "0 0\n";
    for (std::size_t i = 0; i < n; ++i) {
      const double inc = draws[p * n + i];
      b += inc;
      doc.table.rows.push_back({static_cast<std::uint64_t>(p),
                                static_cast<std::uint64_t>(i), inc, b});
      if (plot.is_open()) plot << i + 1 << ' ' << format_double(b) << '\n';
    }
  }
  doc.summary["jitter"] = sampler.jitter();
  return doc;
}

Document dispatch(const RunConfig& config, const BifBmParams& params) {
  switch (config.command) {
    case Command::kKernel:
      return cmd_kernel(config, params);
    case Command::kRateTable:
      return cmd_rate_table(config, params);
    case Command::kMc:
      return cmd_mc(config, params);
    case Command::kAsclt:
      return cmd_asclt(config, params);
    case Command::kSample:
      return cmd_sample(config, params);
  }
  throw DomainError("command", "unknown");
}

template <typename T, std::size_t N>
std::vector<std::array<T, 2>> pairs_of(const std::vector<T>& flat,
                                       std::string_view flag) {
  static_assert(N == 2);
  if (flat.size() % 2 != 0) {
    throw CLI::ValidationError(std::string(flag), "expects pairs of values");
  }
  std::vector<std::array<T, 2>> out;
  for (std::size_t k = 0; k < flat.size(); k += 2) {
    out.push_back({flat[k], flat[k + 1]});
  }
  return out;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kKernel:
      return "kernel";
    case Command::kRateTable:
      return "rate-table";
    case Command::kMc:
      return "mc";
    case Command::kAsclt:
      return "asclt";
    case Command::kSample:
      return "sample";
  }
  return "unknown";
}

std::string_view to_string(Format format) {
  return format == Format::kCsv ? "csv" : "json";
}

namespace {

Command command_from(std::string_view name) {
  for (Command c : {Command::kKernel, Command::kRateTable, Command::kMc,
                    Command::kAsclt, Command::kSample}) {
    if (to_string(c) == name) return c;
  }
  throw DomainError("command", "unknown command '" + std::string(name) + "'");
}

Format format_from(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw DomainError("format", "must be csv or json");
}

}  // namespace

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{
      {"command", to_string(c.command)},
      {"H", c.H},
      {"K", c.K},
      {"n", c.n},
      {"n_list", c.n_list},
      {"m", c.m},
      {"seed", c.seed},
      {"threads", c.threads},
      {"format", to_string(c.format)},
      {"out", c.out},
      {"scheme", c.scheme},
      {"cap", c.cap},
      {"deterministic", c.deterministic},
      {"plot_data", c.plot_data},
      {"cov", c.cov_points},
      {"rho", c.rho_range ? nlohmann::json(*c.rho_range) : nlohmann::json()},
      {"gamma", c.gamma_points},
      {"theta", c.theta_points},
      {"dump", c.dump},
      {"paths", c.paths},
      {"mode", c.mode},
      {"phi", c.phi},
      {"reps", c.reps},
      {"tol", c.tol},
  };
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  c.command = command_from(j.at("command").get<std::string>());
  j.at("H").get_to(c.H);
  j.at("K").get_to(c.K);
  j.at("n").get_to(c.n);
  j.at("n_list").get_to(c.n_list);
  j.at("m").get_to(c.m);
  j.at("seed").get_to(c.seed);
  j.at("threads").get_to(c.threads);
  c.format = format_from(j.at("format").get<std::string>());
  j.at("out").get_to(c.out);
  j.at("scheme").get_to(c.scheme);
  j.at("cap").get_to(c.cap);
  j.at("deterministic").get_to(c.deterministic);
  j.at("plot_data").get_to(c.plot_data);
  j.at("cov").get_to(c.cov_points);
  if (j.at("rho").is_null()) {
    c.rho_range.reset();
  } else {
    c.rho_range = j.at("rho").get<std::array<std::int64_t, 2>>();
  }
  j.at("gamma").get_to(c.gamma_points);
  j.at("theta").get_to(c.theta_points);
  j.at("dump").get_to(c.dump);
  j.at("paths").get_to(c.paths);
  j.at("mode").get_to(c.mode);
  j.at("phi").get_to(c.phi);
  j.at("reps").get_to(c.reps);
  j.at("tol").get_to(c.tol);
}

std::array<std::int64_t, 2> parse_range(std::string_view text) {
  const auto dots = text.find("..");
  std::array<std::int64_t, 2> out{};
  auto parse = [&](std::string_view part, std::int64_t& value) {
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    return ec == std::errc() && ptr == part.data() + part.size() && !part.empty();
  };
  if (dots == std::string_view::npos) {
    if (!parse(text, out[0])) throw DomainError("rho", "expected A..B");
    out[1] = out[0];
    return out;
  }
  if (!parse(text.substr(0, dots), out[0]) ||
      !parse(text.substr(dots + 2), out[1])) {
    throw DomainError("rho", "expected A..B with integers A <= B");
  }
  if (out[0] > out[1]) throw DomainError("rho", "range A..B needs A <= B");
  return out;
}

std::size_t effective_cap(const RunConfig& config) {
  if (config.cap > 0) return config.cap;
  const char* env = std::getenv("BIFBM_CAP");
  if (env == nullptr || *env == '\0') return kDefaultCap;
  const std::string_view text(env);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw DomainError("BIFBM_CAP", "must be a positive integer");
  }
  return value;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

ParseOutcome parse_args(int argc, const char* const* argv, std::ostream& out,
                        std::ostream& err) {
  RunConfig config;
  std::string format = "json";
  CLI::App app{"Bifractional Brownian motion: kernels, exact quadratic-variation "
               "statistics, exact sampling and Monte Carlo checks."};
  app.name("bifbm");
  app.set_version_flag("--version", BIFBM_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--H", config.H, "Hurst-type exponent H in (0,1)");
  app.add_option("--K", config.K, "Second exponent K in (0,1]");
  app.add_option("--seed", config.seed, "Master seed (64-bit)");
  app.add_option("--threads", config.threads,
                 "Worker threads, 0 = all cores; never changes results");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", config.out, "Write the table here instead of stdout");
  app.add_option("--cap", config.cap,
                 "Largest matrix dimension allowed (default: $BIFBM_CAP or 8192)");
  app.add_flag("--deterministic", config.deterministic,
               "Omit the timestamp so output is byte-reproducible");
  app.add_option("--plot-data", config.plot_data,
                 "Also write a whitespace-separated data file for gnuplot");

  std::vector<double> cov_flat;
  std::string rho_text;
  std::vector<std::uint64_t> gamma_flat;
  std::vector<std::uint64_t> theta_flat;

  auto* kernel = app.add_subcommand("kernel", "Evaluate R, rho, gamma and theta");
  kernel->add_option("--cov", cov_flat, "R(s,t) at times S T (repeatable)")
      ->type_size(2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->type_name("S T");
  kernel->add_option("--rho", rho_text, "rho(r) for r in A..B");
  kernel->add_option("--gamma", gamma_flat, "gamma(i,j) (repeatable)")
      ->type_size(2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->type_name("I J");
  kernel->add_option("--theta", theta_flat, "theta(i,j) (repeatable)")
      ->type_size(2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->type_name("I J");
  kernel->footer("CSV columns: " + std::string(kKernelColumns));

  auto* rate = app.add_subcommand(
      "rate-table", "Exact Var Z_n, A(n) and Stein bound per n");
  rate->add_option("--n-list", config.n_list, "Strictly ascending sizes")
      ->delimiter(',');
  rate->add_option("--n", config.n, "Single size");
  rate->footer("CSV columns: " + std::string(kRateColumns));

  auto* mc = app.add_subcommand("mc", "Monte Carlo sample of V_n and its KS distance");
  mc->add_option("--n", config.n, "Number of increments")->required();
  mc->add_option("--m", config.m, "Number of paths (>= 100)");
  mc->add_option("--dump", config.dump, "Write the sorted V_n sample as CSV");
  mc->footer("CSV columns: " + std::string(kMcColumns));

  auto* asclt = app.add_subcommand("asclt", "Almost-sure CLT log-averages");
  asclt->add_option("--mode", config.mode, "bifbm: k^-HK B_k; vn: V_k")
      ->check(CLI::IsMember({"bifbm", "vn"}));
  asclt->add_option("--phi", config.phi,
                    "cos, sin, logistic, clamp_sq or const:<c>");
  asclt->add_option("--reps", config.reps, "Paths (path indices 0..reps-1)");
  asclt->add_option("--tol", config.tol, "Pass tolerance on |average - E phi(N)|");
  asclt->add_option("--scheme", config.scheme, "exact-divisor or snapped-grid (vn)");
  asclt->add_option("N,--n", config.n, "n_max (bifbm) or N_grid (vn)")->required();
  asclt->footer("CSV columns: " + std::string(kAscltColumns));

  auto* sample = app.add_subcommand("sample", "Dump exact increment paths");
  sample->add_option("--n", config.n, "Number of increments")->required();
  sample->add_option("--paths", config.paths, "Number of paths");
  sample->footer("CSV columns: " + std::string(kSampleColumns));

  try {
    app.parse(argc, argv);
    if (kernel->parsed()) {
      config.command = Command::kKernel;
      config.cov_points = pairs_of<double, 2>(cov_flat, "--cov");
      config.gamma_points = pairs_of<std::uint64_t, 2>(gamma_flat, "--gamma");
      config.theta_points = pairs_of<std::uint64_t, 2>(theta_flat, "--theta");
      if (!rho_text.empty()) config.rho_range = parse_range(rho_text);
    } else if (rate->parsed()) {
      config.command = Command::kRateTable;
    } else if (mc->parsed()) {
      config.command = Command::kMc;
    } else if (asclt->parsed()) {
      config.command = Command::kAsclt;
    } else {
      config.command = Command::kSample;
    }
    config.format = format_from(format);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kExitOk : kExitDomain};
  } catch (const DomainError& e) {
    err << "bifbm: invalid " << e.what() << '\n';
    return {std::nullopt, kExitDomain};
  }
  return {config, kExitOk};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const BifBmParams params(config.H, config.K);
    const Document doc = dispatch(config, params);
    std::ofstream file;
    if (!config.out.empty()) file = open_output(config.out, "out");
    std::ostream& os = config.out.empty() ? out : file;
    if (config.format == Format::kCsv) {
      write_csv(doc.table, os);
    } else {
      write_json(config, params, doc, os);
    }
    os.flush();
    return kExitOk;
  } catch (const DomainError& e) {
    err << "bifbm: invalid " << e.what() << '\n';
    return kExitDomain;
  } catch (const CapacityError& e) {
    err << "bifbm: " << e.what() << " (raise --cap or BIFBM_CAP)\n";
    return kExitCapacity;
  } catch (const NumericError& e) {
    err << "bifbm: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "bifbm: internal error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  const ParseOutcome parsed = parse_args(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace bifbm::cli
