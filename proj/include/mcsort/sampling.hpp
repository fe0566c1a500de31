#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mcsort/splitmix.hpp"
#include "mcsort/types.hpp"

namespace mcsort {

/// k distinct positions in [0, n_total), uniformly at random, ascending.
/// Floyd's algorithm driven by SplitMix64: for j = n-k .. n-1 draw
/// t = next() mod (j+1) and take t, or j if t was already taken.
inline std::vector<std::uint64_t> sample_positions(std::uint64_t n_total, std::uint64_t k, std::uint64_t seed) {
  if (k > n_total) {
    throw ParameterError("sample of " + std::to_string(k) + " positions requested from " +
                         std::to_string(n_total) + " keys");
  }
  SplitMix64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k) * 2);
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t j = n_total - k; j < n_total; ++j) {
    const std::uint64_t t = rng.next() % (j + 1);
    const std::uint64_t pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Sampling knobs of the oversampling sorts.
struct SamplingParams {
  std::optional<double> omega;                // w_n; default max(1, ceil(lg lg n))
  std::optional<std::size_t> oversampling;    // s for GER/GVR; default ceil(2 w_n^2 lg n)
  double epsilon = 0.5;
  double rho = 1.0;
  std::uint64_t seed = 0;
};

inline double default_omega(std::uint64_t n) {
  if (n < 4) return 1.0;
  return std::max(1.0, std::ceil(std::log2(std::log2(static_cast<double>(n)))));
}

inline double effective_omega(const SamplingParams& params, std::uint64_t n) {
  const double w = params.omega.value_or(default_omega(n));
  if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("omega must be a positive real");
  return w;
}

/// ceil(2 w^2 lg n), at least 1.
inline std::size_t random_oversampling(double omega, std::uint64_t n) {
  if (n < 2) return 1;
  const double s = std::ceil(2.0 * omega * omega * std::log2(static_cast<double>(n)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(s));
}

}  // namespace mcsort
