#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcsort {

using Key = std::uint32_t;

// Keys extended with their global input position; ties between equal keys
// resolve by position so that sampling behaves as if all keys were distinct.
using TaggedKey = std::uint64_t;

inline constexpr Key kMaxKey = std::numeric_limits<Key>::max();
inline constexpr TaggedKey kMaxTagged = std::numeric_limits<TaggedKey>::max();
inline constexpr std::uint64_t kMaxPositions = std::numeric_limits<std::uint32_t>::max();

constexpr TaggedKey tag(Key value, std::uint64_t position) noexcept {
  return (static_cast<TaggedKey>(value) << 32) | (position & 0xFFFFFFFFu);
}
constexpr Key untag(TaggedKey t) noexcept { return static_cast<Key>(t >> 32); }

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unsupported or inconsistent configuration (bad radix, bad p, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numeric parameter outside its admissible range (sample too large, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A precondition on the data was violated (unsorted input to a merge, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// The sort output failed verification against the oracle.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// A worker-owned contiguous run of keys. `sorted` is a promise, not a
/// computed property: operations that require sorted input check the flag.
template <class T>
struct BasicBlock {
  std::vector<T> keys;
  bool sorted = false;

  BasicBlock() = default;
  explicit BasicBlock(std::vector<T> k, bool is_sorted = false)
      : keys(std::move(k)), sorted(is_sorted) {}
  BasicBlock(std::initializer_list<T> k) : keys(k) {}

  std::size_t size() const noexcept { return keys.size(); }
  bool empty() const noexcept { return keys.empty(); }

  friend bool operator==(const BasicBlock& a, const BasicBlock& b) {
    return a.keys == b.keys;
  }
};

using KeyBlock = BasicBlock<Key>;

}  // namespace mcsort
