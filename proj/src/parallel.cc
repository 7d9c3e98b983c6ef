#include "privcurve/parallel.h"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace privcurve {

int default_thread_count() {
  if (const char* env = std::getenv("PRIVCURVE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)>& body, int threads) {
  if (threads <= 0) threads = default_thread_count();
  threads = std::min(threads, n);
  if (n <= 0) return;
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(first_error);
}

}  // namespace privcurve
