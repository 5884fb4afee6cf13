// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace examflow {

/// Worker count from EXAMFLOW_JOBS, else the number of logical CPUs.
unsigned default_jobs();

/// Runs work(i) for i in [0, count) on up to `jobs` threads and hands the
/// results to sink(i, result) on the calling thread in increasing i. At most
/// 2 * jobs results wait for the sink at any time. The first exception from
/// either side stops the run and is rethrown.
template <class Work, class Sink>
void for_each_ordered(std::size_t count, unsigned jobs, Work work, Sink sink) {
  using Result = std::invoke_result_t<Work&, std::size_t>;
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) sink(i, work(i));
    return;
  }
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::size_t, Result> ready;
  std::size_t next_claim = 0, next_emit = 0;
  const std::size_t window = 2 * static_cast<std::size_t>(jobs);
  std::exception_ptr failure;
  bool stop = false;

  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || next_claim >= count || next_claim < next_emit + window; });
        if (stop || next_claim >= count) return;
        i = next_claim++;
      }
      try {
        Result r = work(i);
        std::lock_guard lock(mu);
        ready.emplace(i, std::move(r));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> threads;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  threads.reserve(n);
  for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);

  while (true) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return stop || next_emit >= count || ready.count(next_emit); });
    if (stop || next_emit >= count) break;
    auto node = ready.extract(next_emit);
    lock.unlock();
    try {
      sink(next_emit, std::move(node.mapped()));
    } catch (...) {
      std::lock_guard relock(mu);
      if (!failure) failure = std::current_exception();
      stop = true;
      cv.notify_all();
      break;
    }
    lock.lock();
    ++next_emit;
    cv.notify_all();
  }
  {
    std::lock_guard lock(mu);
    stop = true;
  }
  cv.notify_all();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace examflow
