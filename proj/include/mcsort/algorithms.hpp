#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcsort/distribution.hpp"
#include "mcsort/mbsp.hpp"
#include "mcsort/network.hpp"
#include "mcsort/radix.hpp"
#include "mcsort/sample_sort.hpp"
#include "mcsort/serial.hpp"

namespace mcsort {

enum class Algorithm { sr4, pr4, pr2, btn, oet, gsd, gvr, ger };

inline constexpr std::array<Algorithm, 8> kAllAlgorithms{Algorithm::sr4, Algorithm::pr4, Algorithm::pr2,
                                                         Algorithm::btn, Algorithm::oet, Algorithm::gsd,
                                                         Algorithm::gvr, Algorithm::ger};

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::sr4: return "sr4";
    case Algorithm::pr4: return "pr4";
    case Algorithm::pr2: return "pr2";
    case Algorithm::btn: return "btn";
    case Algorithm::oet: return "oet";
    case Algorithm::gsd: return "gsd";
    case Algorithm::gvr: return "gvr";
    case Algorithm::ger: return "ger";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (auto a : kAllAlgorithms) {
    if (algorithm_name(a) == s) return a;
  }
  return std::nullopt;
}

inline bool needs_power_of_two(Algorithm a) {
  return a == Algorithm::btn || a == Algorithm::gsd || a == Algorithm::gvr || a == Algorithm::ger;
}

/// Which cost model predicts this algorithm, if any.
inline std::optional<mbsp::Model> cost_model(Algorithm a) {
  return mbsp::model_for(algorithm_name(a));
}

struct SortConfig {
  Algorithm algo = Algorithm::sr4;
  std::size_t p = 1;
  SamplingParams sampling;
};

/// Throws ConfigError for combinations the algorithms reject.
inline void validate(const SortConfig& cfg) {
  if (cfg.p == 0) throw ConfigError("p must be at least 1");
  if (cfg.algo == Algorithm::sr4 && cfg.p != 1) throw ConfigError("sr4 is serial; p must be 1");
  if (needs_power_of_two(cfg.algo) && !is_power_of_two(cfg.p)) {
    throw ConfigError(std::string(algorithm_name(cfg.algo)) + " needs a power-of-two p, got " +
                      std::to_string(cfg.p));
  }
}

/// Runs one algorithm on already partitioned blocks (blocks.size() == p).
inline SortResult sort_blocks(std::vector<KeyBlock> blocks, const SortConfig& cfg) {
  validate(cfg);
  if (blocks.size() != cfg.p) throw ConfigError("expected one block per worker");
  switch (cfg.algo) {
    case Algorithm::sr4: {
      SortResult res;
      res.blocks.push_back(sr4(std::move(blocks[0])));
      res.stats.received.push_back(res.blocks[0].size());
      return res;
    }
    case Algorithm::pr4: return parallel_radix_sort(std::move(blocks), {.radix = 256});
    case Algorithm::pr2: return parallel_radix_sort(std::move(blocks), {.radix = 65536});
    case Algorithm::btn: return btn_sort(std::move(blocks));
    case Algorithm::oet: return oet_sort(std::move(blocks));
    case Algorithm::gsd: return gsd_sort(std::move(blocks), cfg.sampling);
    case Algorithm::gvr: return gvr_sort(std::move(blocks), cfg.sampling);
    case Algorithm::ger: return ger_sort(std::move(blocks), cfg.sampling);
  }
  throw ConfigError("unknown algorithm");
}

inline SortResult sort_keys(std::span<const Key> input, const SortConfig& cfg) {
  validate(cfg);
  return sort_blocks(partition_evenly(input, cfg.p), cfg);
}

}  // namespace mcsort
