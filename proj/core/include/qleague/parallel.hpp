#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qleague {

/// Runs body(i) for i in [0, count) on up to `threads` workers with contiguous
/// index blocks. Outputs must be written to per-index slots. If several
/// indices throw, the exception from the lowest index is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        for (std::size_t i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            errors[w] = std::current_exception();
            error_index[w] = i;
            return;
          }
        }
      });
    }
  }
  std::size_t first = workers;
  for (std::size_t w = 0; w < workers; ++w)
    if (errors[w] && (first == workers || error_index[w] < error_index[first])) first = w;
  if (first != workers) std::rethrow_exception(errors[first]);
}

inline unsigned default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace qleague
