#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gelato {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Splits [0, count) into `workers` contiguous chunks and runs
// fn(begin, end, worker) for each. Chunk boundaries depend only on count and
// workers, so per-worker partial results can be reduced in worker order for
// schedule-independent output.
template <typename Fn>
void parallel_chunks(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count <= 1) {
    fn(std::size_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t base = count / workers;
  const std::size_t extra = count % workers;
  std::size_t start = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    const std::size_t begin = start;
    start += len;
    threads.emplace_back([&, begin, len, w] {
      try {
        fn(begin, begin + len, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gelato
