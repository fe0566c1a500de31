#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mcsort/serial.hpp"
#include "mcsort/types.hpp"

namespace mcsort {

/// Splits `input` into p consecutive blocks; the first n mod p blocks get one
/// extra key.
inline std::vector<KeyBlock> partition_evenly(std::span<const Key> input, std::size_t p) {
  if (p == 0) throw ConfigError("p must be at least 1");
  std::vector<KeyBlock> blocks(p);
  const std::size_t q = input.size() / p, extra = input.size() % p;
  std::size_t at = 0;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t len = q + (k < extra ? 1 : 0);
    blocks[k].keys.assign(input.begin() + static_cast<std::ptrdiff_t>(at),
                          input.begin() + static_cast<std::ptrdiff_t>(at + len));
    blocks[k].sorted = len <= 1;
    at += len;
  }
  return blocks;
}

inline std::vector<Key> concatenate(const std::vector<KeyBlock>& blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  std::vector<Key> out;
  out.reserve(total);
  for (const auto& b : blocks) out.insert(out.end(), b.keys.begin(), b.keys.end());
  return out;
}

struct SortStats {
  std::size_t stages = 0;     // network stages / radix rounds executed
  std::size_t exchanges = 0;  // pairwise merge-splits across all stages
  std::vector<std::size_t> received;  // keys per worker after routing
  std::optional<SplitterSet> splitters;
  std::size_t oversampling = 0;  // s
  std::size_t sample_size = 0;
  bool regime_warning = false;   // p^2 w^2 lg^2 n is not small against n

  std::size_t max_received() const {
    std::size_t m = 0;
    for (auto r : received) m = r > m ? r : m;
    return m;
  }
};

/// Final distribution: concatenating blocks in worker order gives the sorted
/// sequence.
struct SortResult {
  std::vector<KeyBlock> blocks;
  SortStats stats;

  std::vector<Key> keys() const { return concatenate(blocks); }
  std::size_t max_block() const {
    std::size_t m = 0;
    for (const auto& b : blocks) m = b.size() > m ? b.size() : m;
    return m;
  }
};

}  // namespace mcsort
