#pragma once

// In-process bulk-synchronous runtime. A team of p workers runs one program
// per thread; workers exchange data only through collectives, each of which
// ends the current superstep with a barrier. Data posted in superstep t is
// readable by its recipients only after that barrier.

#include <any>
#include <chrono>
#include <compare>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "mcsort/types.hpp"

namespace mcsort::bsp {

struct WorkerId {
  std::size_t value = 0;
  friend auto operator<=>(const WorkerId&, const WorkerId&) = default;
};

// Workers disagreed on which collective to run, or misused one.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Some workers wait at a barrier that the others will never reach.
class DeadlockError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// A worker program threw something that is not a library error.
class WorkerFailure : public Error {
 public:
  WorkerFailure(WorkerId worker, const std::string& what)
      : Error("worker " + std::to_string(worker.value) + " failed: " + what), worker_(worker) {}
  WorkerId worker() const noexcept { return worker_; }

 private:
  WorkerId worker_;
};

enum class Collective { sync, all_to_all, gather_counters, broadcast };

inline const char* to_string(Collective c) {
  switch (c) {
    case Collective::sync: return "sync";
    case Collective::all_to_all: return "all_to_all";
    case Collective::gather_counters: return "gather_counters";
    case Collective::broadcast: return "broadcast";
  }
  return "?";
}

struct TeamOptions {
  std::chrono::milliseconds deadlock_timeout{std::chrono::seconds(120)};
};

namespace detail {

// Thrown in workers that were blocked when the team aborted; never escapes
// spawn_team.
struct TeamAborted {};

class TeamState {
 public:
  TeamState(std::size_t p, TeamOptions opts)
      : p_(p), opts_(opts), arrivals_(p), mail_{std::vector<std::any>(p * p), std::vector<std::any>(p * p)} {}

  std::size_t size() const noexcept { return p_; }

  std::any& slot(std::uint64_t step, std::size_t from, std::size_t to) {
    return mail_[step & 1u][from * p_ + to];
  }

  void arrive_and_wait(std::size_t me, Collective kind, std::uint64_t step) {
    std::unique_lock lock(mu_);
    if (aborted_) throw TeamAborted{};
    arrivals_[me] = Arrival{kind, step};
    ++arrived_;
    if (arrived_ == p_) {
      for (std::size_t k = 1; k < p_; ++k) {
        if (arrivals_[k].kind != arrivals_[0].kind || arrivals_[k].step != arrivals_[0].step) {
          std::ostringstream os;
          os << "collective mismatch: worker 0 called " << to_string(arrivals_[0].kind) << " in superstep "
             << arrivals_[0].step << ", worker " << k << " called " << to_string(arrivals_[k].kind)
             << " in superstep " << arrivals_[k].step;
          abort_locked(std::make_exception_ptr(ProtocolError(os.str())));
          throw TeamAborted{};
        }
      }
      arrived_ = 0;
      ++generation_;
      cv_.notify_all();
      return;
    }
    check_stranded_locked();
    const std::uint64_t gen = generation_;
    const bool ok = cv_.wait_for(lock, opts_.deadlock_timeout, [&] { return aborted_ || generation_ != gen; });
    if (aborted_) throw TeamAborted{};
    if (!ok) {
      std::ostringstream os;
      os << "deadlock: worker " << me << " waited " << opts_.deadlock_timeout.count() << " ms in superstep " << step
         << " (" << to_string(kind) << ")";
      abort_locked(std::make_exception_ptr(DeadlockError(os.str())));
      throw TeamAborted{};
    }
  }

  void finish(std::size_t me) {
    std::lock_guard lock(mu_);
    finished_.push_back(me);
    check_stranded_locked();
  }

  void fail(std::exception_ptr e) {
    std::lock_guard lock(mu_);
    abort_locked(std::move(e));
  }

  std::exception_ptr error() const {
    std::lock_guard lock(mu_);
    return error_;
  }

 private:
  struct Arrival {
    Collective kind = Collective::sync;
    std::uint64_t step = 0;
  };

  void check_stranded_locked() {
    if (aborted_ || arrived_ == 0 || finished_.empty() || arrived_ + finished_.size() != p_) return;
    std::ostringstream os;
    os << "deadlock: worker " << finished_.front() << " returned while " << arrived_
       << " worker(s) wait at a barrier";
    abort_locked(std::make_exception_ptr(DeadlockError(os.str())));
  }

  void abort_locked(std::exception_ptr e) {
    if (!aborted_) {
      aborted_ = true;
      error_ = std::move(e);
    }
    cv_.notify_all();
  }

  std::size_t p_;
  TeamOptions opts_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t arrived_ = 0;
  std::uint64_t generation_ = 0;
  std::vector<std::size_t> finished_;
  bool aborted_ = false;
  std::exception_ptr error_;
  std::vector<Arrival> arrivals_;
  std::vector<std::any> mail_[2];
};

}  // namespace detail

/// Handle a worker program receives. Not copyable; only valid inside the
/// program invocation.
class Worker {
 public:
  Worker(detail::TeamState& team, std::size_t id) : team_(team), id_(id) {}
  Worker(const Worker&) = delete;
  Worker& operator=(const Worker&) = delete;

  WorkerId id() const noexcept { return WorkerId{id_}; }
  std::size_t rank() const noexcept { return id_; }
  std::size_t size() const noexcept { return team_.size(); }
  std::uint64_t superstep() const noexcept { return step_; }

  void sync() { end_superstep(Collective::sync); }

  /// outgoing[j] goes to worker j. The result holds the blocks addressed to
  /// this worker, indexed by sender.
  template <class T>
  std::vector<std::vector<T>> all_to_all(std::vector<std::vector<T>> outgoing) {
    const std::size_t p = size();
    if (outgoing.size() != p) {
      throw ConfigError("all_to_all: worker " + std::to_string(id_) + " supplied " +
                        std::to_string(outgoing.size()) + " blocks for " + std::to_string(p) + " workers");
    }
    for (std::size_t j = 0; j < p; ++j) team_.slot(step_, id_, j) = std::move(outgoing[j]);
    const std::uint64_t step = step_;
    end_superstep(Collective::all_to_all);
    std::vector<std::vector<T>> incoming(p);
    for (std::size_t k = 0; k < p; ++k) {
      std::any& s = team_.slot(step, k, id_);
      auto* v = std::any_cast<std::vector<T>>(&s);
      if (v == nullptr) throw ProtocolError("all_to_all: element type differs between workers");
      incoming[k] = std::move(*v);
      s.reset();
    }
    return incoming;
  }

  /// Every worker supplies a row of equal length r; every worker gets the
  /// full p x r matrix with row k from worker k.
  std::vector<std::vector<std::uint64_t>> gather_counters(std::span<const std::uint64_t> local) {
    const std::size_t p = size();
    team_.slot(step_, id_, 0) = std::vector<std::uint64_t>(local.begin(), local.end());
    const std::uint64_t step = step_;
    end_superstep(Collective::gather_counters);
    std::vector<std::vector<std::uint64_t>> matrix(p);
    for (std::size_t k = 0; k < p; ++k) {
      matrix[k] = std::any_cast<const std::vector<std::uint64_t>&>(team_.slot(step, k, 0));
      if (matrix[k].size() != local.size()) {
        throw ConfigError("gather_counters: worker " + std::to_string(k) + " supplied " +
                          std::to_string(matrix[k].size()) + " counters, worker " + std::to_string(id_) +
                          " supplied " + std::to_string(local.size()));
      }
    }
    return matrix;
  }

  /// The worker `from` supplies the payload, every other worker passes
  /// std::nullopt. All workers return a copy of the payload.
  template <class T>
  std::vector<T> broadcast(WorkerId from, std::optional<std::vector<T>> payload) {
    if (from.value >= size()) throw ProtocolError("broadcast: source " + std::to_string(from.value) + " out of range");
    team_.slot(step_, id_, 0) = Offer<T>{from.value, std::move(payload)};
    const std::uint64_t step = step_;
    end_superstep(Collective::broadcast);
    std::optional<std::vector<T>> result;
    for (std::size_t k = 0; k < size(); ++k) {
      const auto* offer = std::any_cast<Offer<T>>(&team_.slot(step, k, 0));
      if (offer == nullptr) throw ProtocolError("broadcast: element type differs between workers");
      if (offer->root != from.value) {
        throw ProtocolError("broadcast: worker " + std::to_string(k) + " names source " +
                            std::to_string(offer->root) + ", worker " + std::to_string(id_) + " names " +
                            std::to_string(from.value));
      }
      if (offer->payload.has_value() != (k == from.value)) {
        throw ProtocolError(k == from.value ? "broadcast: source worker " + std::to_string(k) + " sent no payload"
                                            : "broadcast: multiple sources (worker " + std::to_string(k) +
                                                  " also sent a payload)");
      }
      if (k == from.value) result = *offer->payload;
    }
    return std::move(*result);
  }

 private:
  template <class T>
  struct Offer {
    std::size_t root;
    std::optional<std::vector<T>> payload;
  };

  void end_superstep(Collective kind) {
    team_.arrive_and_wait(id_, kind, step_);
    ++step_;
  }

  detail::TeamState& team_;
  std::size_t id_;
  std::uint64_t step_ = 0;
};

/// Runs `program(worker)` on p threads and returns the per-worker results
/// indexed by worker id.
template <class Program>
auto spawn_team(std::size_t p, Program&& program, TeamOptions opts = {})
    -> std::vector<std::invoke_result_t<Program&, Worker&>> {
  using R = std::invoke_result_t<Program&, Worker&>;
  static_assert(!std::is_void_v<R>, "worker programs must return a value");
  if (p == 0) throw ConfigError("spawn_team: p must be at least 1");

  detail::TeamState team(p, opts);
  std::vector<std::optional<R>> results(p);
  std::vector<std::exception_ptr> failures(p);

  auto body = [&](std::size_t id) {
    Worker w(team, id);
    try {
      results[id].emplace(program(w));
      team.finish(id);
    } catch (const detail::TeamAborted&) {
    } catch (...) {
      failures[id] = std::current_exception();
      team.fail(failures[id]);
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(p - 1);
    for (std::size_t id = 1; id < p; ++id) threads.emplace_back(body, id);
    body(0);
  }

  if (auto e = team.error()) {
    for (std::size_t id = 0; id < p; ++id) {
      if (failures[id] != e) continue;
      try {
        std::rethrow_exception(e);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& ex) {
        throw WorkerFailure(WorkerId{id}, ex.what());
      } catch (...) {
        throw WorkerFailure(WorkerId{id}, "unknown exception");
      }
    }
    std::rethrow_exception(e);
  }

  std::vector<R> out;
  out.reserve(p);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace mcsort::bsp
