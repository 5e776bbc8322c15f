#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace brwre {

/// requested > 0 wins; otherwise BRWRE_WORKERS; otherwise hardware concurrency.
int resolve_workers(int requested);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Tasks are claimed from a
/// shared counter; callers write results into slot i so the outcome never depends on
/// scheduling. The first exception thrown by a task is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int workers, F&& fn) {
  std::vector<T> out(count);
  parallel_for(count, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace brwre
