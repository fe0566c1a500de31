#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mcsort/bsp.hpp"
#include "mcsort/mcsort.hpp"

namespace {

using namespace mcsort;
using bsp::Worker;
using bsp::WorkerId;

std::size_t own_id(Worker& w) { return w.rank(); }

TEST(SpawnTeam, SingleWorkerReturnsItsId) {
  EXPECT_EQ(bsp::spawn_team(1, own_id), std::vector<std::size_t>{0});
}

TEST(SpawnTeam, ResultsAreIndexedByWorker) {
  EXPECT_EQ(bsp::spawn_team(4, own_id), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(SpawnTeam, ZeroWorkersIsAConfigError) {
  EXPECT_THROW(bsp::spawn_team(0, own_id), ConfigError);
}

TEST(SpawnTeam, SumOfIdsViaAllToAll) {
  auto out = bsp::spawn_team(4, [](Worker& w) {
    std::vector<std::vector<std::size_t>> send(w.size(), std::vector<std::size_t>{w.rank()});
    auto got = w.all_to_all(std::move(send));
    std::size_t sum = 0;
    for (const auto& v : got) sum += v.at(0);
    return sum;
  });
  EXPECT_EQ(out, (std::vector<std::size_t>{6, 6, 6, 6}));
}

TEST(SpawnTeam, FailureNamesTheWorker) {
  try {
    bsp::spawn_team(4, [](Worker& w) -> int {
      w.sync();
      if (w.rank() == 2) throw std::runtime_error("boom");
      w.sync();
      return 0;
    });
    FAIL() << "expected WorkerFailure";
  } catch (const bsp::WorkerFailure& e) {
    EXPECT_EQ(e.worker(), WorkerId{2});
    EXPECT_NE(std::string(e.what()).find("worker 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(SpawnTeam, LibraryErrorsPropagateUnchanged) {
  EXPECT_THROW(bsp::spawn_team(3,
                               [](Worker& w) -> int {
                                 if (w.rank() == 1) throw ParameterError("bad s");
                                 w.sync();
                                 return 0;
                               }),
               ParameterError);
}

TEST(AllToAll, Swap) {
  auto out = bsp::spawn_team(2, [](Worker& w) {
    std::vector<std::vector<Key>> send(2);
    if (w.rank() == 0) send[1] = {5};
    if (w.rank() == 1) send[0] = {7};
    auto got = w.all_to_all(std::move(send));
    std::vector<Key> flat;
    for (auto& v : got) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
  });
  EXPECT_EQ(out[0], std::vector<Key>{7});
  EXPECT_EQ(out[1], std::vector<Key>{5});
}

TEST(AllToAll, SendToSelfIsIdentity) {
  auto out = bsp::spawn_team(2, [](Worker& w) {
    std::vector<std::vector<Key>> send(2);
    send[w.rank()] = {Key(10 * w.rank() + 1), Key(10 * w.rank() + 2)};
    return w.all_to_all(std::move(send));
  });
  EXPECT_EQ(out[0][0], (std::vector<Key>{1, 2}));
  EXPECT_TRUE(out[0][1].empty());
  EXPECT_EQ(out[1][1], (std::vector<Key>{11, 12}));
  EXPECT_TRUE(out[1][0].empty());
}

TEST(AllToAll, BlocksArriveOrderedBySender) {
  auto out = bsp::spawn_team(4, [](Worker& w) {
    std::vector<std::vector<std::size_t>> send(4);
    for (auto& v : send) v = {w.rank()};
    return w.all_to_all(std::move(send));
  });
  for (const auto& got : out) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(got[k], std::vector<std::size_t>{k});
  }
}

TEST(AllToAll, RandomRoutingConservesMultiset) {
  constexpr std::size_t p = 4, n = 1000;
  std::mt19937_64 rng(42);
  std::vector<Key> keys(n);
  std::vector<std::size_t> dest(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = static_cast<Key>(rng());
    dest[i] = rng() % p;
  }
  auto out = bsp::spawn_team(p, [&](Worker& w) {
    std::vector<std::vector<Key>> send(p);
    for (std::size_t i = w.rank(); i < n; i += p) send[dest[i]].push_back(keys[i]);
    auto got = w.all_to_all(std::move(send));
    std::vector<Key> flat;
    for (auto& v : got) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
  });
  std::vector<Key> received;
  for (std::size_t j = 0; j < p; ++j) {
    for (Key k : out[j]) received.push_back(k);
  }
  std::sort(received.begin(), received.end());
  auto sent = keys;
  std::sort(sent.begin(), sent.end());
  EXPECT_EQ(received, sent);
}

TEST(AllToAll, WrongBlockCountIsConfigError) {
  EXPECT_THROW(bsp::spawn_team(2,
                               [](Worker& w) {
                                 return w.all_to_all(std::vector<std::vector<Key>>(3)).size();
                               }),
               ConfigError);
}

TEST(GatherCounters, TwoByTwo) {
  auto out = bsp::spawn_team(2, [](Worker& w) {
    std::vector<std::uint64_t> row{w.rank() == 0 ? 1u : 0u, w.rank() == 0 ? 0u : 1u};
    return w.gather_counters(row);
  });
  const std::vector<std::vector<std::uint64_t>> want{{1, 0}, {0, 1}};
  EXPECT_EQ(out[0], want);
  EXPECT_EQ(out[1], want);
}

TEST(GatherCounters, SingleWorkerIdentity) {
  auto out = bsp::spawn_team(1, [](Worker& w) {
    std::vector<std::uint64_t> row{3, 1, 4, 1, 5};
    return w.gather_counters(row);
  });
  EXPECT_EQ(out[0], (std::vector<std::vector<std::uint64_t>>{{3, 1, 4, 1, 5}}));
}

TEST(GatherCounters, ColumnSumsEqualGlobalHistogram) {
  constexpr std::size_t p = 4, n = 20000;
  const auto keys = bench::generate_input(n, bench::InputDistribution::uniform32, 11);
  const auto blocks = partition_evenly(keys, p);
  auto out = bsp::spawn_team(p, [&](Worker& w) {
    std::vector<std::uint64_t> hist(256);
    for (Key k : blocks[w.rank()].keys) ++hist[k & 0xFF];
    return w.gather_counters(hist);
  });
  std::vector<std::uint64_t> serial(256);
  for (Key k : keys) ++serial[k & 0xFF];
  for (const auto& matrix : out) {
    ASSERT_EQ(matrix.size(), p);
    for (std::size_t d = 0; d < 256; ++d) {
      std::uint64_t col = 0;
      for (const auto& row : matrix) col += row[d];
      EXPECT_EQ(col, serial[d]);
    }
  }
  EXPECT_EQ(out[0], out[3]);
}

TEST(GatherCounters, LengthMismatchIsConfigError) {
  EXPECT_THROW(bsp::spawn_team(3,
                               [](Worker& w) {
                                 std::vector<std::uint64_t> row(w.rank() == 1 ? 3 : 2);
                                 return w.gather_counters(row).size();
                               }),
               ConfigError);
}

TEST(Broadcast, SingleWorker) {
  auto out = bsp::spawn_team(1, [](Worker& w) {
    return w.broadcast<Key>(WorkerId{0}, std::vector<Key>{4, 2});
  });
  EXPECT_EQ(out[0], (std::vector<Key>{4, 2}));
}

TEST(Broadcast, FromWorkerZero) {
  auto out = bsp::spawn_team(4, [](Worker& w) {
    std::optional<std::vector<Key>> payload;
    if (w.rank() == 0) payload = std::vector<Key>{3, 9, 12};
    return w.broadcast(WorkerId{0}, std::move(payload));
  });
  for (const auto& v : out) EXPECT_EQ(v, (std::vector<Key>{3, 9, 12}));
}

TEST(Broadcast, GsdSplittersAreByteEqualEverywhere) {
  const auto keys = bench::generate_input(50000, bench::InputDistribution::uniform32, 5);
  auto ref = gsd_sort(partition_evenly(keys, 8));
  ASSERT_TRUE(ref.stats.splitters);
  const auto splitters = ref.stats.splitters->tagged();
  ASSERT_EQ(splitters.size(), 7u);
  auto out = bsp::spawn_team(8, [&](Worker& w) {
    std::optional<std::vector<TaggedKey>> payload;
    if (w.rank() == 0) payload = splitters;
    return w.broadcast(WorkerId{0}, std::move(payload));
  });
  for (const auto& v : out) {
    ASSERT_EQ(v.size(), splitters.size());
    EXPECT_EQ(std::memcmp(v.data(), splitters.data(), v.size() * sizeof(TaggedKey)), 0);
  }
}

TEST(Broadcast, MultipleSourcesIsProtocolError) {
  EXPECT_THROW(bsp::spawn_team(3,
                               [](Worker& w) {
                                 std::optional<std::vector<Key>> payload;
                                 if (w.rank() != 2) payload = std::vector<Key>{1};
                                 return w.broadcast(WorkerId{0}, std::move(payload)).size();
                               }),
               bsp::ProtocolError);
}

TEST(Broadcast, DisagreeingSourceIsProtocolError) {
  EXPECT_THROW(bsp::spawn_team(2,
                               [](Worker& w) {
                                 std::optional<std::vector<Key>> payload{std::vector<Key>{1}};
                                 return w.broadcast(WorkerId{w.rank()}, std::move(payload)).size();
                               }),
               bsp::ProtocolError);
}

TEST(Broadcast, SourceOutOfRangeIsProtocolError) {
  EXPECT_THROW(bsp::spawn_team(2,
                               [](Worker& w) {
                                 return w.broadcast<Key>(WorkerId{5}, std::nullopt).size();
                               }),
               bsp::ProtocolError);
}

TEST(Protocol, MismatchedCollectivesAreDetected) {
  try {
    bsp::spawn_team(2, [](Worker& w) -> int {
      if (w.rank() == 0) {
        w.sync();
      } else {
        std::vector<std::uint64_t> row{1};
        w.gather_counters(row);
      }
      return 0;
    });
    FAIL() << "expected ProtocolError";
  } catch (const bsp::DeadlockError&) {
    FAIL() << "mismatch is not a deadlock";
  } catch (const bsp::ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("mismatch"), std::string::npos);
  }
}

TEST(Protocol, SkippedCallIsDetectedAsDeadlock) {
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(bsp::spawn_team(3,
                               [](Worker& w) {
                                 std::vector<std::vector<Key>> send(w.size());
                                 if (w.rank() != 1) w.all_to_all(std::move(send));
                                 return 0;
                               }),
               bsp::DeadlockError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(10));
}

TEST(Protocol, TimeoutCatchesAWorkerThatArrivesTooLate) {
  bsp::TeamOptions opts;
  opts.deadlock_timeout = std::chrono::milliseconds(100);
  try {
    bsp::spawn_team(
        2,
        [](Worker& w) {
          if (w.rank() == 1) std::this_thread::sleep_for(std::chrono::milliseconds(600));
          w.sync();
          return 0;
        },
        opts);
    FAIL() << "expected DeadlockError";
  } catch (const bsp::DeadlockError& e) {
    EXPECT_NE(std::string(e.what()).find("waited 100 ms"), std::string::npos) << e.what();
  }
}

TEST(Protocol, SuperstepIndexAdvancesPerCollective) {
  auto out = bsp::spawn_team(3, [](Worker& w) {
    w.sync();
    std::vector<std::uint64_t> row{1};
    w.gather_counters(row);
    w.all_to_all(std::vector<std::vector<Key>>(w.size()));
    return w.superstep();
  });
  EXPECT_EQ(out, (std::vector<std::uint64_t>{3, 3, 3}));
}

// Racing-read probe: worker 0 posts late; worker 1 enters the exchange at
// once and must not return before worker 0 has posted.
TEST(Barrier, MessagesBecomeVisibleOnlyAfterTheBarrier) {
  using Clock = std::chrono::steady_clock;
  for (int trial = 0; trial < 20; ++trial) {
    std::atomic<Clock::rep> posted_at{0};
    auto out = bsp::spawn_team(2, [&](Worker& w) {
      std::vector<std::vector<int>> send(2);
      if (w.rank() == 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        send[1] = {trial};
        posted_at = Clock::now().time_since_epoch().count();
      }
      auto got = w.all_to_all(std::move(send));
      const auto returned_at = Clock::now().time_since_epoch().count();
      return std::make_pair(returned_at, got[0]);
    });
    EXPECT_GE(out[1].first, posted_at.load());
    EXPECT_EQ(out[1].second, std::vector<int>{trial});
  }
}

// Alternates the sender across supersteps; a stale mailbox would hand the
// receiver the previous step's payload.
TEST(Barrier, ConsecutiveSuperstepsDoNotLeak) {
  auto out = bsp::spawn_team(4, [](Worker& w) {
    std::vector<int> log;
    for (int step = 0; step < 200; ++step) {
      std::vector<std::vector<int>> send(w.size());
      if (static_cast<std::size_t>(step) % w.size() == w.rank()) {
        for (auto& v : send) v = {step};
      }
      auto got = w.all_to_all(std::move(send));
      for (const auto& v : got) log.insert(log.end(), v.begin(), v.end());
    }
    return log;
  });
  std::vector<int> want(200);
  std::iota(want.begin(), want.end(), 0);
  for (const auto& log : out) EXPECT_EQ(log, want);
}

TEST(Determinism, IdenticalProgramIdenticalResults) {
  auto program = [](Worker& w) {
    std::mt19937 rng(static_cast<unsigned>(w.rank()) * 7 + 1);
    std::vector<std::vector<Key>> send(w.size());
    for (int i = 0; i < 300; ++i) send[rng() % w.size()].push_back(static_cast<Key>(rng()));
    return w.all_to_all(std::move(send));
  };
  const auto a = bsp::spawn_team(8, program);
  for (int run = 0; run < 5; ++run) EXPECT_EQ(bsp::spawn_team(8, program), a);
}

}  // namespace
