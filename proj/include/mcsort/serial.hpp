#pragma once

// Sequential building blocks shared by every parallel sort: LSD count-sort
// rounds, merge-split, p-way merging and splitter-based partitioning.

#include <algorithm>
#include <array>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcsort/types.hpp"

namespace mcsort {

namespace detail {

// One stable distribution pass of `in` into `out` on the digit
// (x >> shift) & mask. `counts` must have mask+1 entries; it is zeroed here.
template <std::unsigned_integral T>
void count_sort_pass(std::span<const T> in, std::span<T> out, unsigned shift, std::uint32_t mask,
                     std::vector<std::size_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (const T x : in) ++counts[(x >> shift) & mask];
  std::size_t sum = 0;
  for (auto& c : counts) {
    const std::size_t here = c;
    c = sum;
    sum += here;
  }
  for (const T x : in) out[counts[(x >> shift) & mask]++] = x;
}

inline unsigned radix_bits(std::uint64_t radix) {
  if (radix != (1u << 8) && radix != (1u << 16)) {
    throw ConfigError("unsupported radix " + std::to_string(radix) + " (expected 256 or 65536)");
  }
  return static_cast<unsigned>(std::countr_zero(radix));
}

template <class T>
void require_sorted(const BasicBlock<T>& b, const char* what) {
  if (!b.sorted) throw ContractError(std::string(what) + ": input block is not marked sorted");
#ifndef NDEBUG
  if (!std::is_sorted(b.keys.begin(), b.keys.end())) {
    throw ContractError(std::string(what) + ": input block claims to be sorted but is not");
  }
#endif
}

}  // namespace detail

/// One count-sort round of an LSD radix sort on digit `digit_index` of radix
/// r (256 or 65536). Stable.
inline KeyBlock countsort_round(const KeyBlock& input, unsigned digit_index, std::uint32_t radix) {
  const unsigned bits = detail::radix_bits(radix);
  if (digit_index >= 32 / bits) {
    throw ConfigError("digit index " + std::to_string(digit_index) + " out of range for radix " +
                      std::to_string(radix));
  }
  KeyBlock out(std::vector<Key>(input.size()));
  std::vector<std::size_t> counts(radix);
  detail::count_sort_pass<Key>(input.keys, out.keys, digit_index * bits, radix - 1, counts);
  out.sorted = input.size() <= 1;
  return out;
}

/// LSD radix sort with 8-bit digits over all bytes of T, ping-ponging between
/// the input vector and one scratch buffer.
template <std::unsigned_integral T>
void radix_sort_in_place(std::vector<T>& keys) {
  if (keys.size() <= 1) return;
  std::vector<T> scratch(keys.size());
  std::vector<std::size_t> counts(256);
  for (unsigned shift = 0; shift < 8 * sizeof(T); shift += 8) {
    detail::count_sort_pass<T>(keys, scratch, shift, 0xFF, counts);
    keys.swap(scratch);
  }
}

/// SR4: four count-sort rounds with r = 256.
inline KeyBlock sr4(KeyBlock input) {
  radix_sort_in_place(input.keys);
  input.sorted = true;
  return input;
}

/// The `count` smallest keys of the union of two sorted runs.
template <class T>
std::vector<T> merge_low(std::span<const T> a, std::span<const T> b, std::size_t count) {
  std::vector<T> out(count);
  std::size_t i = 0, j = 0;
  for (std::size_t o = 0; o < count; ++o) {
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      out[o] = a[i++];
    } else {
      out[o] = b[j++];
    }
  }
  return out;
}

/// The `count` largest keys of the union of two sorted runs, ascending.
template <class T>
std::vector<T> merge_high(std::span<const T> a, std::span<const T> b, std::size_t count) {
  std::vector<T> out(count);
  std::size_t i = a.size(), j = b.size();
  for (std::size_t o = count; o-- > 0;) {
    if (j == 0 || (i > 0 && a[i - 1] > b[j - 1])) {
      out[o] = a[--i];
    } else {
      out[o] = b[--j];
    }
  }
  return out;
}

/// Merge-split comparator for block networks: low gets the |a| smallest
/// keys of a and b, high the |b| largest.
template <class T>
std::pair<BasicBlock<T>, BasicBlock<T>> merge_split(const BasicBlock<T>& a, const BasicBlock<T>& b) {
  detail::require_sorted(a, "merge_split");
  detail::require_sorted(b, "merge_split");
  return {BasicBlock<T>(merge_low<T>(a.keys, b.keys, a.size()), true),
          BasicBlock<T>(merge_high<T>(a.keys, b.keys, b.size()), true)};
}

/// Heap-based p-way merge. Equal keys are taken from the lower-indexed block
/// first.
template <class T>
BasicBlock<T> kway_merge(std::span<const BasicBlock<T>> blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) {
    detail::require_sorted(b, "kway_merge");
    total += b.size();
  }
  BasicBlock<T> out;
  out.keys.reserve(total);
  out.sorted = true;
  if (blocks.size() == 1) {
    out.keys = blocks[0].keys;
    return out;
  }

  struct Head {
    T key;
    std::size_t block;
    std::size_t pos;
  };
  auto later = [](const Head& x, const Head& y) {
    return x.key != y.key ? x.key > y.key : x.block > y.block;
  };
  std::vector<Head> storage;
  storage.reserve(blocks.size());
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later, std::move(storage));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (!blocks[k].empty()) heap.push({blocks[k].keys[0], k, 0});
  }
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    out.keys.push_back(h.key);
    const auto& src = blocks[h.block].keys;
    if (++h.pos < src.size()) {
      h.key = src[h.pos];
      heap.push(h);
    }
  }
  return out;
}

template <class T>
BasicBlock<T> kway_merge(const std::vector<BasicBlock<T>>& blocks) {
  return kway_merge(std::span<const BasicBlock<T>>(blocks));
}

/// p-1 sorted splitters defining p buckets. A key goes to the first bucket j
/// whose splitter it does not exceed; keys above every splitter go to bucket
/// p-1.
///
/// Splitters are stored as tagged keys. Splitters built from plain keys
/// compare on the value alone ("key <= splitter"); splitters built from
/// tagged samples also order equal values by global input position.
class SplitterSet {
 public:
  SplitterSet() = default;

  static SplitterSet from_keys(std::span<const Key> keys) {
    std::vector<TaggedKey> t(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) t[i] = tag(keys[i], kMaxPositions);
    return SplitterSet(std::move(t));
  }

  static SplitterSet from_tagged(std::vector<TaggedKey> tagged) { return SplitterSet(std::move(tagged)); }

  std::size_t size() const noexcept { return tagged_.size(); }
  std::size_t buckets() const noexcept { return tagged_.size() + 1; }
  const std::vector<TaggedKey>& tagged() const noexcept { return tagged_; }

  std::vector<Key> keys() const {
    std::vector<Key> k(tagged_.size());
    std::transform(tagged_.begin(), tagged_.end(), k.begin(), untag);
    return k;
  }

  std::size_t bucket_of(Key key, std::uint64_t position) const {
    const TaggedKey t = tag(key, position);
    return static_cast<std::size_t>(std::lower_bound(tagged_.begin(), tagged_.end(), t) - tagged_.begin());
  }

  friend bool operator==(const SplitterSet&, const SplitterSet&) = default;

 private:
  explicit SplitterSet(std::vector<TaggedKey> t) : tagged_(std::move(t)) {
    if (!std::is_sorted(tagged_.begin(), tagged_.end())) throw ContractError("splitters are not sorted");
  }

  std::vector<TaggedKey> tagged_;
};

/// Boundaries of the p contiguous sub-ranges of a sorted block induced by the
/// splitters: sub-block j is [bounds[j], bounds[j+1]). `base_position` is the
/// global input position of block[0].
inline std::vector<std::size_t> split_points(const KeyBlock& block, const SplitterSet& splitters,
                                             std::uint64_t base_position = 0) {
  detail::require_sorted(block, "split_by_splitters");
  const auto& keys = block.keys;
  std::vector<std::size_t> bounds(splitters.buckets() + 1, keys.size());
  bounds[0] = 0;
  std::size_t lo = 0;
  for (std::size_t j = 0; j < splitters.size(); ++j) {
    const TaggedKey s = splitters.tagged()[j];
    std::size_t first = lo, count = keys.size() - lo;
    while (count > 0) {  // first index whose tagged key exceeds s
      const std::size_t half = count / 2;
      const std::size_t mid = first + half;
      if (tag(keys[mid], base_position + mid) <= s) {
        first = mid + 1;
        count -= half + 1;
      } else {
        count = half;
      }
    }
    bounds[j + 1] = lo = first;
  }
  return bounds;
}

inline std::vector<KeyBlock> split_by_splitters(const KeyBlock& block, const SplitterSet& splitters,
                                                std::uint64_t base_position = 0) {
  const auto bounds = split_points(block, splitters, base_position);
  std::vector<KeyBlock> parts(splitters.buckets());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    parts[j].keys.assign(block.keys.begin() + static_cast<std::ptrdiff_t>(bounds[j]),
                         block.keys.begin() + static_cast<std::ptrdiff_t>(bounds[j + 1]));
    parts[j].sorted = true;
  }
  return parts;
}

struct PackedBlock {
  KeyBlock packed;
  std::vector<std::size_t> counts;  // keys per destination bucket
};

/// Count-sorts an unsorted block by destination bucket, stable within a
/// bucket. Uses the same boundary rule as split_points.
inline PackedBlock pack_by_destination(const KeyBlock& block, const SplitterSet& splitters,
                                       std::uint64_t base_position = 0) {
  const std::size_t p = splitters.buckets();
  std::vector<std::uint32_t> dest(block.size());
  PackedBlock out;
  out.counts.assign(p, 0);
  for (std::size_t i = 0; i < block.size(); ++i) {
    dest[i] = static_cast<std::uint32_t>(splitters.bucket_of(block.keys[i], base_position + i));
    ++out.counts[dest[i]];
  }
  std::vector<std::size_t> offset(p, 0);
  for (std::size_t j = 1; j < p; ++j) offset[j] = offset[j - 1] + out.counts[j - 1];
  out.packed.keys.resize(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) out.packed.keys[offset[dest[i]]++] = block.keys[i];
  out.packed.sorted = block.sorted;  // bucket order preserves a sorted input
  return out;
}

}  // namespace mcsort
