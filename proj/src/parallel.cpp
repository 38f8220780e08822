#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace polyfk {

int thread_count() {
  if (const char *env = std::getenv("POLYFK_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1)
      return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)> &body) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      constexpr int chunk = 8;
      while (!failed.load(std::memory_order_relaxed)) {
        const int begin = next.fetch_add(chunk);
        if (begin >= n)
          break;
        const int end = std::min(begin + chunk, n);
        for (int i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true))
              error = std::current_exception();
            return;
          }
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace polyfk
