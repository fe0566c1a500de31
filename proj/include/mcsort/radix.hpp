#pragma once

// PR4 / PR2: parallel LSD radix sort over a worker team.
//
// Each round: local digit histogram, gather of the p x r count matrix, global
// rank of every key (all smaller digits, then the same digit on lower
// workers, then the local stable index), routing to the worker owning that
// rank, placement at the rank-derived offset. Worker j owns ranks
// [j*ceil(n/p), (j+1)*ceil(n/p)).

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "mcsort/bsp.hpp"
#include "mcsort/distribution.hpp"
#include "mcsort/serial.hpp"

namespace mcsort {

struct RadixOptions {
  std::uint32_t radix = 256;
  unsigned max_rounds = std::numeric_limits<unsigned>::max();  // for tests: stop after t rounds
};

/// Collective: every worker of the team calls it with its own block.
inline KeyBlock parallel_radix_sort_worker(bsp::Worker& w, KeyBlock mine, const RadixOptions& opts,
                                           std::size_t* rounds_done = nullptr) {
  const unsigned bits = detail::radix_bits(opts.radix);
  const std::size_t p = w.size(), me = w.rank();
  const std::size_t r = std::size_t{1} << bits;

  const std::array<std::uint64_t, 1> my_size{mine.size()};
  const auto sizes = w.gather_counters(my_size);
  std::uint64_t n = 0;
  for (const auto& row : sizes) n += row[0];
  if (rounds_done != nullptr) *rounds_done = 0;
  if (n == 0) return KeyBlock({}, true);

  const std::uint64_t chunk = (n + p - 1) / p;
  const std::uint64_t slice_lo = std::min<std::uint64_t>(n, me * chunk);
  const std::uint64_t slice_hi = std::min<std::uint64_t>(n, (me + 1) * chunk);
  const unsigned rounds = std::min(32 / bits, opts.max_rounds);

  std::vector<std::uint64_t> hist(r);
  std::vector<std::uint64_t> my_base(r);
  std::vector<std::size_t> local_off(r);
  std::vector<Key> staged;

  for (unsigned round = 0; round < rounds; ++round) {
    const unsigned shift = round * bits;
    const auto digit = [&](Key x) { return (x >> shift) & (r - 1); };

    std::fill(hist.begin(), hist.end(), 0);
    for (const Key x : mine.keys) ++hist[digit(x)];
    const auto matrix = w.gather_counters(hist);

    std::uint64_t running = 0;
    for (std::size_t d = 0; d < r; ++d) {
      for (std::size_t k = 0; k < p; ++k) {
        if (k == me) my_base[d] = running;
        running += matrix[k][d];
      }
    }

    // Stage keys in local digit order; their ranks then increase along the
    // staged array, so each destination receives one contiguous range per digit.
    std::size_t sum = 0;
    for (std::size_t d = 0; d < r; ++d) {
      local_off[d] = sum;
      sum += hist[d];
    }
    staged.resize(mine.size());
    for (const Key x : mine.keys) staged[local_off[digit(x)]++] = x;

    std::vector<std::vector<Key>> outgoing(p);
    std::size_t lo = 0;
    for (std::size_t d = 0; d < r; ++d) {
      std::uint64_t rank = my_base[d], left = hist[d];
      while (left > 0) {
        const std::uint64_t owner = rank / chunk;
        const std::uint64_t take = std::min(left, (owner + 1) * chunk - rank);
        auto& dst = outgoing[owner];
        dst.insert(dst.end(), staged.begin() + static_cast<std::ptrdiff_t>(lo),
                   staged.begin() + static_cast<std::ptrdiff_t>(lo + take));
        rank += take;
        lo += take;
        left -= take;
      }
    }

    const auto incoming = w.all_to_all(std::move(outgoing));

    std::vector<Key> placed(slice_hi - slice_lo);
    std::vector<std::size_t> cursor(p, 0);
    running = 0;
    for (std::size_t d = 0; d < r && running < slice_hi; ++d) {
      for (std::size_t k = 0; k < p; ++k) {
        const std::uint64_t c = matrix[k][d];
        const std::uint64_t a = std::max(running, slice_lo), b = std::min(running + c, slice_hi);
        if (a < b) {
          const auto& src = incoming[k];
          std::copy(src.begin() + static_cast<std::ptrdiff_t>(cursor[k]),
                    src.begin() + static_cast<std::ptrdiff_t>(cursor[k] + (b - a)),
                    placed.begin() + static_cast<std::ptrdiff_t>(a - slice_lo));
          cursor[k] += b - a;
        }
        running += c;
      }
    }
    mine.keys = std::move(placed);
    if (rounds_done != nullptr) ++*rounds_done;
  }
  mine.sorted = rounds == 32 / bits;
  return mine;
}

/// PR4 (radix 256) or PR2 (radix 65536) over p = blocks.size() workers.
inline SortResult parallel_radix_sort(std::vector<KeyBlock> blocks, const RadixOptions& opts = {}) {
  detail::radix_bits(opts.radix);
  struct Out {
    KeyBlock block;
    std::size_t rounds;
  };
  auto parts = bsp::spawn_team(blocks.size(), [&](bsp::Worker& w) {
    Out o;
    o.block = parallel_radix_sort_worker(w, std::move(blocks[w.rank()]), opts, &o.rounds);
    return o;
  });
  SortResult res;
  for (auto& o : parts) {
    res.stats.received.push_back(o.block.size());
    res.blocks.push_back(std::move(o.block));
  }
  res.stats.stages = parts.front().rounds;
  return res;
}

}  // namespace mcsort
