#pragma once

// Benchmark harness: seeded inputs, timed and verified runs, and tables in
// the "SR4 seconds, speedup for the rest" layout plus predicted speedups.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "mcsort/algorithms.hpp"
#include "mcsort/mbsp.hpp"
#include "mcsort/splitmix.hpp"

namespace mcsort::bench {

enum class InputDistribution { uniform32, duplicates_heavy, sorted, reversed, constant };

inline constexpr std::array<InputDistribution, 5> kAllDistributions{
    InputDistribution::uniform32, InputDistribution::duplicates_heavy, InputDistribution::sorted,
    InputDistribution::reversed, InputDistribution::constant};

inline std::string_view distribution_name(InputDistribution d) {
  switch (d) {
    case InputDistribution::uniform32: return "uniform32";
    case InputDistribution::duplicates_heavy: return "duplicates-heavy";
    case InputDistribution::sorted: return "sorted";
    case InputDistribution::reversed: return "reversed";
    case InputDistribution::constant: return "constant";
  }
  return "?";
}

inline std::optional<InputDistribution> parse_distribution(std::string_view s) {
  for (auto d : kAllDistributions) {
    if (distribution_name(d) == s) return d;
  }
  return std::nullopt;
}

/// Deterministic per (n, distribution, seed). Keys are the high 32 bits of
/// successive SplitMix64 outputs seeded with `seed`; duplicates-heavy maps the
/// top 4 bits onto 16 values spread over the key range.
inline std::vector<Key> generate_input(std::size_t n, InputDistribution dist, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Key> keys(n);
  switch (dist) {
    case InputDistribution::uniform32:
    case InputDistribution::sorted:
    case InputDistribution::reversed:
      for (auto& k : keys) k = static_cast<Key>(rng.next() >> 32);
      if (dist == InputDistribution::sorted) std::sort(keys.begin(), keys.end());
      if (dist == InputDistribution::reversed) std::sort(keys.begin(), keys.end(), std::greater<>{});
      break;
    case InputDistribution::duplicates_heavy:
      for (auto& k : keys) k = static_cast<Key>(rng.next() >> 60) * 0x11111111u;
      break;
    case InputDistribution::constant:
      std::fill(keys.begin(), keys.end(), static_cast<Key>(rng.next() >> 32));
      break;
  }
  return keys;
}

/// "<k>M" means k * 1024000 keys (so 8M = 8192000); anything else must be a
/// plain count.
inline std::optional<std::uint64_t> parse_size(std::string_view s) {
  std::uint64_t mult = 1;
  if (!s.empty() && (s.back() == 'M' || s.back() == 'm')) {
    mult = 1024000;
    s.remove_suffix(1);
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v * mult;
}

inline std::string size_label(std::uint64_t n) {
  if (n != 0 && n % 1024000 == 0) return std::to_string(n / 1024000) + "M";
  return std::to_string(n);
}

struct RunRecord {
  std::string algo;
  std::uint64_t n = 0;
  std::size_t p = 1;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0;
  double speedup = 0;  // baseline_seconds / wall_seconds
  std::optional<double> predicted_speedup;
  bool verified = false;
  std::size_t max_bucket = 0;  // most keys any worker held after routing

  // Not part of the CSV schema.
  unsigned logical_cores = 0;
  unsigned physical_cores = 0;

  friend bool operator==(const RunRecord& a, const RunRecord& b) {
    return a.algo == b.algo && a.n == b.n && a.p == b.p && a.rep == b.rep && a.seed == b.seed &&
           a.wall_seconds == b.wall_seconds && a.speedup == b.speedup &&
           a.predicted_speedup == b.predicted_speedup && a.verified == b.verified && a.max_bucket == b.max_bucket;
  }
};

/// Distinct (physical id, core id) pairs in /proc/cpuinfo; falls back to the
/// logical count.
inline unsigned physical_core_count() {
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<std::string, std::string>> cores;
  std::string line, phys = "0";
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value = colon + 2 <= line.size() ? line.substr(colon + 2) : "";
    if (key == "physical id") phys = value;
    if (key == "core id") cores.emplace(phys, value);
  }
  if (!cores.empty()) return static_cast<unsigned>(cores.size());
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Throws VerificationError naming the first position where `output`
/// differs from the sorted input, or the first descent.
inline void verify_sorted_permutation(const std::vector<Key>& sorted_input, const std::vector<Key>& output) {
  for (std::size_t i = 1; i < output.size(); ++i) {
    if (output[i - 1] > output[i]) {
      throw VerificationError("output out of order at position " + std::to_string(i) + ": " +
                              std::to_string(output[i - 1]) + " > " + std::to_string(output[i]));
    }
  }
  if (output.size() != sorted_input.size()) {
    throw VerificationError("output has " + std::to_string(output.size()) + " keys, input " +
                            std::to_string(sorted_input.size()));
  }
  const auto diff = std::mismatch(output.begin(), output.end(), sorted_input.begin());
  if (diff.first != output.end()) {
    throw VerificationError("multiset differs at position " + std::to_string(diff.first - output.begin()) +
                            ": got " + std::to_string(*diff.first) + ", expected " +
                            std::to_string(*diff.second));
  }
}

struct ExperimentSpec {
  SortConfig config;
  std::uint64_t n = 0;
  InputDistribution dist = InputDistribution::uniform32;
  std::uint64_t seed = 0;
  std::size_t reps = 4;
  std::size_t warmup = 0;
  double g_over_G = 5.0;
};

struct Experiment {
  std::vector<RunRecord> records;
  double baseline_seconds = 0;  // mean SR4 time at the same n and seed
  double mean_seconds = 0;
  double mean_speedup = 0;
};

namespace detail {

inline double time_sort(const std::vector<KeyBlock>& blocks, const SortConfig& cfg, SortResult& out) {
  auto copy = blocks;
  const auto t0 = std::chrono::steady_clock::now();
  out = sort_blocks(std::move(copy), cfg);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace detail

/// Runs `reps` timed repetitions (after `warmup` discarded ones) plus the
/// SR4 baseline, verifying every output.
inline Experiment run_experiment(const ExperimentSpec& spec) {
  validate(spec.config);
  if (spec.reps == 0) throw ConfigError("reps must be at least 1");
  const auto input = generate_input(spec.n, spec.dist, spec.seed);
  auto oracle = input;
  std::sort(oracle.begin(), oracle.end());

  const auto blocks = partition_evenly(input, spec.config.p);
  const auto serial_blocks = partition_evenly(input, 1);
  const SortConfig serial{Algorithm::sr4, 1, {}};
  const bool self_baseline = spec.config.algo == Algorithm::sr4;

  std::optional<double> predicted;
  if (auto model = cost_model(spec.config.algo)) {
    predicted = mbsp::predicted_speedup(*model, static_cast<double>(spec.n), static_cast<double>(spec.config.p),
                                        1.0, spec.g_over_G, spec.config.sampling.omega);
  }

  SortResult result;
  for (std::size_t i = 0; i < spec.warmup; ++i) detail::time_sort(blocks, spec.config, result);

  const unsigned logical = std::max(1u, std::thread::hardware_concurrency());
  const unsigned physical = physical_core_count();
  Experiment ex;
  std::vector<double> times;
  double baseline_total = 0;
  for (std::size_t rep = 0; rep < spec.reps; ++rep) {
    const double t = detail::time_sort(blocks, spec.config, result);
    verify_sorted_permutation(oracle, result.keys());
    times.push_back(t);
    if (self_baseline) {
      baseline_total += t;
    } else {
      SortResult base;
      baseline_total += detail::time_sort(serial_blocks, serial, base);
      verify_sorted_permutation(oracle, base.keys());
    }

    RunRecord rec;
    rec.algo = std::string(algorithm_name(spec.config.algo));
    rec.n = spec.n;
    rec.p = spec.config.p;
    rec.rep = rep;
    rec.seed = spec.seed;
    rec.wall_seconds = t;
    rec.predicted_speedup = predicted;
    rec.verified = true;
    rec.max_bucket = std::max(result.stats.max_received(), result.max_block());
    rec.logical_cores = logical;
    rec.physical_cores = physical;
    ex.records.push_back(std::move(rec));
  }
  ex.baseline_seconds = baseline_total / static_cast<double>(spec.reps);
  double sum_t = 0, sum_s = 0;
  for (std::size_t i = 0; i < ex.records.size(); ++i) {
    auto& rec = ex.records[i];
    rec.speedup = self_baseline ? 1.0 : (rec.wall_seconds > 0 ? ex.baseline_seconds / rec.wall_seconds : 0.0);
    sum_t += rec.wall_seconds;
    sum_s += rec.speedup;
  }
  ex.mean_seconds = sum_t / static_cast<double>(ex.records.size());
  ex.mean_speedup = sum_s / static_cast<double>(ex.records.size());
  return ex;
}

enum class TableFormat { paper, csv };

inline std::optional<TableFormat> parse_format(std::string_view s) {
  if (s == "paper") return TableFormat::paper;
  if (s == "csv") return TableFormat::csv;
  return std::nullopt;
}

inline constexpr std::string_view kCsvHeader =
    "algo,n,p,rep,seed,wall_seconds,speedup,predicted_speedup,verified,max_bucket";

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline int algo_order(const std::string& name) {
  const auto a = parse_algorithm(name);
  return a ? static_cast<int>(*a) : 100;
}

}  // namespace detail

inline std::string to_csv(const std::vector<RunRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.algo + ',' + std::to_string(r.n) + ',' + std::to_string(r.p) + ',' + std::to_string(r.rep) + ',' +
           std::to_string(r.seed) + ',' + detail::fmt("%.17g", r.wall_seconds) + ',' +
           detail::fmt("%.17g", r.speedup) + ',' +
           (r.predicted_speedup ? detail::fmt("%.17g", *r.predicted_speedup) : std::string{}) + ',' +
           (r.verified ? "true" : "false") + ',' + std::to_string(r.max_bucket) + '\n';
  }
  return out;
}

/// Inverse of to_csv. Throws ConfigError on malformed input.
inline std::vector<RunRecord> parse_csv(std::string_view text) {
  std::vector<RunRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv: missing or unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 10) throw ConfigError("csv: expected 10 fields in '" + line + "'");
    try {
      RunRecord r;
      r.algo = f[0];
      r.n = std::stoull(f[1]);
      r.p = std::stoull(f[2]);
      r.rep = std::stoull(f[3]);
      r.seed = std::stoull(f[4]);
      r.wall_seconds = std::stod(f[5]);
      r.speedup = std::stod(f[6]);
      if (!f[7].empty()) r.predicted_speedup = std::stod(f[7]);
      if (f[8] != "true" && f[8] != "false") throw ConfigError("csv: bad verified flag '" + f[8] + "'");
      r.verified = f[8] == "true";
      r.max_bucket = std::stoull(f[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ConfigError("csv: malformed number in '" + line + "'");
    }
  }
  return out;
}

/// Rows algo x p, one column per n. The SR4 row shows seconds, other rows the
/// mean speedup over their records, followed by predicted speedups. Only
/// verified records are used; an empty set gives an empty string.
inline std::string to_paper_table(const std::vector<RunRecord>& records) {
  using RowKey = std::pair<int, std::size_t>;
  struct Cell {
    double sum_seconds = 0, sum_speedup = 0;
    std::size_t count = 0;
    std::optional<double> predicted;
  };
  std::map<RowKey, std::string> row_names;
  std::map<RowKey, std::map<std::uint64_t, Cell>> rows;
  std::set<std::uint64_t> sizes;
  for (const auto& r : records) {
    if (!r.verified) continue;
    const RowKey key{detail::algo_order(r.algo), r.p};
    row_names[key] = r.algo;
    auto& c = rows[key][r.n];
    c.sum_seconds += r.wall_seconds;
    c.sum_speedup += r.speedup;
    ++c.count;
    c.predicted = r.predicted_speedup;
    sizes.insert(r.n);
  }
  if (rows.empty()) return {};

  std::ostringstream os;
  os << "Time(sec) for SR4; Speedup for other\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-5s %-6s", "", "");
  os << buf;
  for (auto n : sizes) {
    std::snprintf(buf, sizeof buf, " %9s", size_label(n).c_str());
    os << buf;
  }
  os << " |";
  for (auto n : sizes) {
    std::snprintf(buf, sizeof buf, " %9s", ("pred " + size_label(n)).c_str());
    os << buf;
  }
  os << '\n';
  for (const auto& [key, cells] : rows) {
    std::string name = row_names[key];
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
    std::snprintf(buf, sizeof buf, "%-5s %-6s", name.c_str(), ("p=" + std::to_string(key.second)).c_str());
    os << buf;
    const bool serial = row_names[key] == "sr4";
    for (auto n : sizes) {
      const auto it = cells.find(n);
      if (it == cells.end()) {
        std::snprintf(buf, sizeof buf, " %9s", "");
      } else if (serial) {
        std::snprintf(buf, sizeof buf, " %9.3f", it->second.sum_seconds / static_cast<double>(it->second.count));
      } else {
        std::snprintf(buf, sizeof buf, " %9.2f", it->second.sum_speedup / static_cast<double>(it->second.count));
      }
      os << buf;
    }
    os << " |";
    for (auto n : sizes) {
      const auto it = cells.find(n);
      if (serial || it == cells.end()) {
        std::snprintf(buf, sizeof buf, " %9s", "");
      } else if (it->second.predicted) {
        std::snprintf(buf, sizeof buf, " %9.2f", *it->second.predicted);
      } else {
        std::snprintf(buf, sizeof buf, " %9s", "-");
      }
      os << buf;
    }
    os << '\n';
  }
  std::string text = os.str();
  std::string cleaned;
  for (const auto& line : detail::split(text, '\n')) {
    if (line.empty()) continue;
    cleaned += line.substr(0, line.find_last_not_of(' ') + 1) + '\n';
  }
  return cleaned;
}

inline std::string emit_table(const std::vector<RunRecord>& records, TableFormat format) {
  return format == TableFormat::csv ? to_csv(records) : to_paper_table(records);
}

}  // namespace mcsort::bench
