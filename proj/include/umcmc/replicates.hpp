#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace umcmc {

/// Wall-clock bookkeeping of one replicate.
struct ReplicateTiming {
  std::uint64_t index = 0;
  std::size_t worker = 0;
  double start_seconds = 0.0;
  double duration_seconds = 0.0;
  std::uint64_t completion_rank = 0;
};

template <typename Result>
struct ReplicateBatch {
  /// results[c] holds replicate c, or nothing if the batch was interrupted first.
  std::vector<std::optional<Result>> results;
  /// One entry per finished replicate, in completion order.
  std::vector<ReplicateTiming> timings;
  bool interrupted = false;

  std::size_t completed() const { return timings.size(); }
};

/// Runs fn(c) for c = 0..count-1 on `workers` threads with dynamic index
/// assignment. Results are stored by index, so any reduction over `results`
/// in index order is independent of scheduling. A set `stop` flag prevents new
/// replicates from starting; already started ones finish. The first exception
/// thrown by fn is rethrown after all workers have joined.
template <typename Result, typename Fn>
ReplicateBatch<Result> run_replicates(std::size_t count, std::size_t workers, Fn&& fn,
                                      const std::atomic<bool>* stop = nullptr) {
  using clock = std::chrono::steady_clock;
  ReplicateBatch<Result> batch;
  batch.results.resize(count);
  batch.timings.reserve(count);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  const auto origin = clock::now();

  auto work = [&](std::size_t worker) {
    while (true) {
      if (failed.load() || (stop && stop->load())) return;
      const std::size_t c = next.fetch_add(1);
      if (c >= count) return;
      const auto begin = clock::now();
      try {
        Result r = fn(static_cast<std::uint64_t>(c));
        const auto end = clock::now();
        std::lock_guard lock(mutex);
        batch.results[c] = std::move(r);
        batch.timings.push_back({static_cast<std::uint64_t>(c), worker,
                                 std::chrono::duration<double>(begin - origin).count(),
                                 std::chrono::duration<double>(end - begin).count(),
                                 static_cast<std::uint64_t>(batch.timings.size())});
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(count, 1)));
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (error) std::rethrow_exception(error);
  batch.interrupted = batch.timings.size() < count;
  return batch;
}

}  // namespace umcmc
