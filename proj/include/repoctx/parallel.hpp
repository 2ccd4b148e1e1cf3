#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace repoctx {

// Calls fn(i) for i in [0, n) on up to `workers` threads. Results are
// written by index so output order never depends on scheduling. The
// exception from the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, std::size_t workers, Fn&& fn) {
  using Out = decltype(fn(items.front()));
  std::vector<Out> out(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) { out[i] = fn(items[i]); });
  return out;
}

}  // namespace repoctx
