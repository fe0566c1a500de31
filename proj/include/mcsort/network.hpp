#pragma once

// Block sorting networks: every worker's sorted block is one "key" of a
// p-input comparator network whose comparators are merge-splits.
//
// Merge-split networks are only correct on equal block sizes, so blocks are
// padded with max-value sentinels up to the largest block before the network
// runs. Afterwards the sentinels occupy the global tail and are trimmed;
// worker j keeps global positions [j*B, min(n, (j+1)*B)).

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mcsort/bsp.hpp"
#include "mcsort/distribution.hpp"
#include "mcsort/serial.hpp"

namespace mcsort {

/// After the merge-split, `keep_low` holds the smaller half.
struct Comparator {
  std::size_t keep_low;
  std::size_t keep_high;
  friend bool operator==(const Comparator&, const Comparator&) = default;
};

using NetworkStage = std::vector<Comparator>;

inline bool is_power_of_two(std::size_t p) { return p != 0 && std::has_single_bit(p); }

/// lg p (lg p + 1) / 2 stages. Stage k (1-based) merges bitonic runs of 2^k
/// blocks; worker i sorts ascending iff bit k of i is 0.
inline std::vector<NetworkStage> btn_schedule(std::size_t p) {
  if (!is_power_of_two(p)) throw ConfigError("BTN needs a power-of-two p, got " + std::to_string(p));
  const unsigned lg = static_cast<unsigned>(std::countr_zero(p));
  std::vector<NetworkStage> stages;
  for (unsigned k = 1; k <= lg; ++k) {
    for (unsigned j = k; j >= 1; --j) {
      NetworkStage stage;
      const std::size_t dist = std::size_t{1} << (j - 1);
      for (std::size_t i = 0; i < p; ++i) {
        const std::size_t partner = i ^ dist;
        if (partner < i) continue;
        const bool ascending = ((i >> k) & 1u) == 0;
        stage.push_back(ascending ? Comparator{i, partner} : Comparator{partner, i});
      }
      stages.push_back(std::move(stage));
    }
  }
  return stages;
}

/// p rounds; even rounds pair (0,1),(2,3),..., odd rounds (1,2),(3,4),...
inline std::vector<NetworkStage> oet_schedule(std::size_t p) {
  if (p == 0) throw ConfigError("OET needs p >= 1");
  std::vector<NetworkStage> rounds(p);
  for (std::size_t t = 0; t < p; ++t) {
    for (std::size_t i = t % 2; i + 1 < p; i += 2) rounds[t].push_back({i, i + 1});
  }
  return rounds;
}

template <class T>
struct NetworkPart {
  BasicBlock<T> block;
  std::size_t stride = 0;  // padded block size; this block starts at rank*stride
  std::size_t stages = 0;
  std::size_t exchanges = 0;
};

/// Collective: locally sorts, pads, runs `stages` and trims.
template <class T>
NetworkPart<T> run_network(bsp::Worker& w, BasicBlock<T> mine, const std::vector<NetworkStage>& stages) {
  const std::size_t p = w.size(), me = w.rank();
  constexpr T pad = std::numeric_limits<T>::max();

  radix_sort_in_place(mine.keys);
  mine.sorted = true;

  const std::array<std::uint64_t, 1> my_size{mine.size()};
  const auto sizes = w.gather_counters(my_size);
  std::uint64_t n = 0, stride = 0;
  for (const auto& row : sizes) {
    n += row[0];
    stride = std::max(stride, row[0]);
  }
  mine.keys.resize(stride, pad);

  NetworkPart<T> out;
  out.stride = stride;
  for (const auto& stage : stages) {
    std::size_t partner = p;
    bool low = false;
    for (const auto& c : stage) {
      if (c.keep_low == me) partner = c.keep_high, low = true;
      if (c.keep_high == me) partner = c.keep_low, low = false;
    }
    std::vector<std::vector<T>> outgoing(p);
    if (partner != p) outgoing[partner] = mine.keys;
    auto incoming = w.all_to_all(std::move(outgoing));
    if (partner != p) {
      const auto& theirs = incoming[partner];
      mine.keys = low ? merge_low<T>(mine.keys, theirs, stride) : merge_high<T>(mine.keys, theirs, stride);
    }
    ++out.stages;
    out.exchanges += stage.size();
  }

  const std::uint64_t begin = me * stride;
  const std::uint64_t keep = n > begin ? std::min<std::uint64_t>(stride, n - begin) : 0;
  mine.keys.resize(keep);
  out.block = std::move(mine);
  return out;
}

namespace detail {

inline SortResult run_network_team(std::vector<KeyBlock> blocks, const std::vector<NetworkStage>& stages) {
  auto parts = bsp::spawn_team(blocks.size(), [&](bsp::Worker& w) {
    return run_network<Key>(w, std::move(blocks[w.rank()]), stages);
  });
  SortResult res;
  res.stats.stages = parts.front().stages;
  res.stats.exchanges = parts.front().exchanges;
  for (auto& part : parts) {
    res.stats.received.push_back(part.block.size());
    res.blocks.push_back(std::move(part.block));
  }
  return res;
}

}  // namespace detail

/// BTN: local SR4, then the lg p (lg p + 1) / 2 stage bitonic network.
inline SortResult btn_sort(std::vector<KeyBlock> blocks) {
  const auto stages = btn_schedule(blocks.size());
  return detail::run_network_team(std::move(blocks), stages);
}

/// OET: local SR4, then p rounds of odd-even transposition.
inline SortResult oet_sort(std::vector<KeyBlock> blocks) {
  const auto rounds = oet_schedule(blocks.size());
  return detail::run_network_team(std::move(blocks), rounds);
}

}  // namespace mcsort
