#include "sbdf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace sbdf {

namespace {
std::atomic<int> g_threads{1};
constexpr int kMinRowsPerThread = 16;
}  // namespace

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

void for_rows(int rows, const std::function<void(int, int)>& fn) {
  const int workers = std::min(thread_count(), rows / kMinRowsPerThread);
  if (workers <= 1) {
    fn(0, rows);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  const int chunk = (rows + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int b = w * chunk;
    const int e = std::min(rows, b + chunk);
    if (b < e) pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(0, std::min(rows, chunk));
}

}  // namespace sbdf
