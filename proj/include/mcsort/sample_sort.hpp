#pragma once

// Oversampling sorts on a worker team:
//   GSD  local SR4, regular sample of ceil(w) p keys per worker, splitters,
//        binary-search split, p-way merge.
//   GER  as GSD but the sample is s p - 1 keys drawn uniformly at random.
//   GVR  random sample first, split the unsorted blocks by destination,
//        local SR4 last.
// Samples are sorted with the bitonic network on the same team. Sample keys
// carry their global input position so equal keys still split evenly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcsort/bsp.hpp"
#include "mcsort/distribution.hpp"
#include "mcsort/network.hpp"
#include "mcsort/sampling.hpp"
#include "mcsort/serial.hpp"

namespace mcsort {

/// Upper bound on keys per output block for GSD with r = ceil(w):
/// ceil((1 + 1/r) ceil(n/p)) + r p.
inline std::uint64_t gsd_balance_bound(std::uint64_t n, std::uint64_t p, std::uint64_t r) {
  const std::uint64_t c = (n + p - 1) / p;
  return c + (c + r - 1) / r + r * p;
}

/// True when p^2 w^2 lg^2 n is not small against n, i.e. outside the regime
/// the balance analysis assumes. Reported, never enforced.
inline bool outside_sampling_regime(std::uint64_t n, std::uint64_t p, double omega) {
  if (n < 2) return true;
  const double lg = std::log2(static_cast<double>(n));
  return static_cast<double>(p * p) * omega * omega * lg * lg >= static_cast<double>(n);
}

struct SamplePlan {
  std::size_t oversampling = 0;  // s
  std::size_t sample_size = 0;   // keys that go into the sample sort
};

/// Resolves s and the sample size of GER/GVR for n keys on p workers.
inline SamplePlan random_sample_plan(const SamplingParams& params, std::uint64_t n, std::size_t p) {
  SamplePlan plan;
  if (params.oversampling) {
    const std::size_t s = *params.oversampling;
    if (s == 0) throw ParameterError("oversampling factor s must be at least 1");
    if (s * p - 1 > n) {
      throw ParameterError("sample of s p - 1 = " + std::to_string(s * p - 1) + " keys exceeds n = " +
                           std::to_string(n));
    }
    plan.oversampling = s;
  } else {
    std::size_t s = random_oversampling(effective_omega(params, n), n);
    if (s * p - 1 > n) s = static_cast<std::size_t>((n + 1) / p);
    plan.oversampling = s;
  }
  plan.sample_size = plan.oversampling == 0 ? 0 : plan.oversampling * p - 1;
  return plan;
}

namespace detail {

struct Layout {
  std::uint64_t n = 0;
  std::uint64_t offset = 0;  // global position of this worker's first key
};

inline Layout team_layout(bsp::Worker& w, std::size_t my_size) {
  const std::array<std::uint64_t, 1> row{my_size};
  const auto sizes = w.gather_counters(row);
  Layout l;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (k < w.rank()) l.offset += sizes[k][0];
    l.n += sizes[k][0];
  }
  if (l.n >= kMaxPositions) throw ConfigError("oversampling sorts support fewer than 2^32 - 1 keys");
  return l;
}

// Splitter i (1 <= i < p) is the (i s)-th smallest sample key. Holders send
// theirs to worker 0, which broadcasts the set. Ranks past the sample end
// become +inf sentinels.
inline SplitterSet select_splitters(bsp::Worker& w, const NetworkPart<TaggedKey>& sorted_sample,
                                    std::size_t sample_size, std::size_t s) {
  const std::size_t p = w.size();
  const std::uint64_t lo = w.rank() * sorted_sample.stride;
  const std::uint64_t hi = lo + sorted_sample.block.size();
  std::vector<std::vector<TaggedKey>> outgoing(p);
  for (std::size_t i = 1; i < p; ++i) {
    const std::uint64_t pos = static_cast<std::uint64_t>(i) * s;  // 1-based rank
    if (s == 0 || pos > sample_size) break;
    if (pos - 1 >= lo && pos - 1 < hi) outgoing[0].push_back(sorted_sample.block.keys[pos - 1 - lo]);
  }
  auto incoming = w.all_to_all(std::move(outgoing));
  std::optional<std::vector<TaggedKey>> mine;
  if (w.rank() == 0) {
    std::vector<TaggedKey> all;
    for (auto& part : incoming) all.insert(all.end(), part.begin(), part.end());
    all.resize(p - 1, kMaxTagged);
    mine = std::move(all);
  }
  return SplitterSet::from_tagged(w.broadcast(bsp::WorkerId{0}, std::move(mine)));
}

// The sample positions that fall into [offset, offset + len), tagged with
// their global position.
inline std::vector<TaggedKey> pick_random_sample(const KeyBlock& mine, const Layout& layout,
                                                 std::size_t sample_size, std::uint64_t seed) {
  const auto positions = sample_positions(layout.n, sample_size, seed);
  auto first = std::lower_bound(positions.begin(), positions.end(), layout.offset);
  auto last = std::lower_bound(first, positions.end(), layout.offset + mine.size());
  std::vector<TaggedKey> out;
  out.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) out.push_back(tag(mine.keys[*it - layout.offset], *it));
  return out;
}

inline std::vector<std::vector<Key>> cut(const KeyBlock& block, const std::vector<std::size_t>& bounds) {
  std::vector<std::vector<Key>> parts(bounds.size() - 1);
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    parts[j].assign(block.keys.begin() + static_cast<std::ptrdiff_t>(bounds[j]),
                    block.keys.begin() + static_cast<std::ptrdiff_t>(bounds[j + 1]));
  }
  return parts;
}

inline std::size_t total_size(const std::vector<std::vector<Key>>& parts) {
  std::size_t t = 0;
  for (const auto& v : parts) t += v.size();
  return t;
}

// Split a sorted block around the splitters, route, and p-way merge.
inline KeyBlock split_route_merge(bsp::Worker& w, const KeyBlock& mine, const SplitterSet& splitters,
                                  const Layout& layout, std::size_t& received) {
  auto incoming = w.all_to_all(cut(mine, split_points(mine, splitters, layout.offset)));
  received = total_size(incoming);
  std::vector<KeyBlock> runs;
  runs.reserve(incoming.size());
  for (auto& v : incoming) runs.emplace_back(std::move(v), true);
  return kway_merge(runs);
}

}  // namespace detail

struct SampleSortPart {
  KeyBlock block;
  std::size_t received = 0;
  SplitterSet splitters;
  std::size_t oversampling = 0;
  std::size_t sample_size = 0;
  bool regime_warning = false;
};

/// Collective GSD step sequence. p must be a power of two.
inline SampleSortPart gsd_worker(bsp::Worker& w, KeyBlock mine, const SamplingParams& params) {
  const std::size_t p = w.size();
  const auto layout = detail::team_layout(w, mine.size());
  const double omega = effective_omega(params, layout.n);
  const std::size_t r = static_cast<std::size_t>(std::ceil(omega));
  const std::size_t s = r * p;

  SampleSortPart out;
  out.oversampling = s;
  out.sample_size = s * p;
  out.regime_warning = outside_sampling_regime(layout.n, p, omega);

  mine = sr4(std::move(mine));

  // rp - 1 evenly spaced keys splitting X_k into rp segments, plus the maximum.
  std::vector<TaggedKey> sample(s, kMaxTagged);
  const std::size_t len = mine.size();
  if (len > 0) {
    for (std::size_t i = 1; i <= s; ++i) {
      const std::size_t idx = (len * i + s - 1) / s - 1;
      sample[i - 1] = tag(mine.keys[idx], layout.offset + idx);
    }
  }
  const auto sorted_sample = run_network<TaggedKey>(w, BasicBlock<TaggedKey>(std::move(sample), true),
                                                    btn_schedule(p));
  out.splitters = detail::select_splitters(w, sorted_sample, out.sample_size, s);

  out.block = detail::split_route_merge(w, mine, out.splitters, layout, out.received);
  const std::uint64_t bound = gsd_balance_bound(layout.n, p, r);
  if (out.received > bound) {
    throw ContractError("GSD balance bound violated: worker " + std::to_string(w.rank()) + " received " +
                        std::to_string(out.received) + " keys, bound " + std::to_string(bound));
  }
  return out;
}

/// Collective GER step sequence.
inline SampleSortPart ger_worker(bsp::Worker& w, KeyBlock mine, const SamplingParams& params) {
  const std::size_t p = w.size();
  const auto layout = detail::team_layout(w, mine.size());
  const auto plan = random_sample_plan(params, layout.n, p);

  SampleSortPart out;
  out.oversampling = plan.oversampling;
  out.sample_size = plan.sample_size;
  out.regime_warning = outside_sampling_regime(layout.n, p, effective_omega(params, layout.n));

  mine = sr4(std::move(mine));
  auto sample = detail::pick_random_sample(mine, layout, plan.sample_size, params.seed);
  const auto sorted_sample = run_network<TaggedKey>(w, BasicBlock<TaggedKey>(std::move(sample)), btn_schedule(p));
  out.splitters = detail::select_splitters(w, sorted_sample, plan.sample_size, plan.oversampling);

  out.block = detail::split_route_merge(w, mine, out.splitters, layout, out.received);
  return out;
}

/// Collective GVR step sequence.
inline SampleSortPart gvr_worker(bsp::Worker& w, KeyBlock mine, const SamplingParams& params) {
  const std::size_t p = w.size();
  const auto layout = detail::team_layout(w, mine.size());
  const auto plan = random_sample_plan(params, layout.n, p);

  SampleSortPart out;
  out.oversampling = plan.oversampling;
  out.sample_size = plan.sample_size;
  out.regime_warning = outside_sampling_regime(layout.n, p, effective_omega(params, layout.n));

  auto sample = detail::pick_random_sample(mine, layout, plan.sample_size, params.seed);
  const auto sorted_sample = run_network<TaggedKey>(w, BasicBlock<TaggedKey>(std::move(sample)), btn_schedule(p));
  out.splitters = detail::select_splitters(w, sorted_sample, plan.sample_size, plan.oversampling);

  // Keys move only once their destination is known: count-sort by bucket,
  // then ship each bucket as one contiguous message.
  const auto packed = pack_by_destination(mine, out.splitters, layout.offset);
  std::vector<std::size_t> bounds(p + 1, 0);
  for (std::size_t j = 0; j < p; ++j) bounds[j + 1] = bounds[j] + packed.counts[j];
  auto incoming = w.all_to_all(detail::cut(packed.packed, bounds));
  out.received = detail::total_size(incoming);

  KeyBlock joined;
  joined.keys.reserve(out.received);
  for (const auto& v : incoming) joined.keys.insert(joined.keys.end(), v.begin(), v.end());
  out.block = sr4(std::move(joined));
  return out;
}

namespace detail {

template <class WorkerFn>
SortResult run_sample_sort(std::vector<KeyBlock> blocks, const SamplingParams& params, WorkerFn fn,
                           const char* name) {
  const std::size_t p = blocks.size();
  if (p == 1) {
    SortResult res;
    res.blocks.push_back(sr4(std::move(blocks[0])));
    res.stats.received.push_back(res.blocks[0].size());
    return res;
  }
  if (!is_power_of_two(p)) {
    throw ConfigError(std::string(name) + " sorts its sample with BTN and needs a power-of-two p, got " +
                      std::to_string(p));
  }
  auto parts = bsp::spawn_team(p, [&](bsp::Worker& w) { return fn(w, std::move(blocks[w.rank()]), params); });
  SortResult res;
  res.stats.splitters = parts.front().splitters;
  res.stats.oversampling = parts.front().oversampling;
  res.stats.sample_size = parts.front().sample_size;
  res.stats.regime_warning = parts.front().regime_warning;
  for (auto& part : parts) {
    res.stats.received.push_back(part.received);
    res.blocks.push_back(std::move(part.block));
  }
  return res;
}

}  // namespace detail

inline SortResult gsd_sort(std::vector<KeyBlock> blocks, const SamplingParams& params = {}) {
  if (params.oversampling) throw ConfigError("GSD derives s = ceil(omega) p; set omega instead of oversampling");
  return detail::run_sample_sort(std::move(blocks), params, gsd_worker, "GSD");
}

inline SortResult ger_sort(std::vector<KeyBlock> blocks, const SamplingParams& params = {}) {
  return detail::run_sample_sort(std::move(blocks), params, ger_worker, "GER");
}

inline SortResult gvr_sort(std::vector<KeyBlock> blocks, const SamplingParams& params = {}) {
  return detail::run_sample_sort(std::move(blocks), params, gvr_worker, "GVR");
}

}  // namespace mcsort
