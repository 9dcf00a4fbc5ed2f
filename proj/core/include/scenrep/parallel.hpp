#ifndef SCENREP_PARALLEL_HPP
#define SCENREP_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace scenrep {

// Worker count: SCENREP_THREADS caps it, hardware concurrency is the default.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SCENREP_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < hw) return static_cast<unsigned>(v);
    if (v >= 1) return static_cast<unsigned>(v) > hw ? hw : static_cast<unsigned>(v);
  }
  return hw;
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// results do not depend on the thread count. Exceptions are rethrown in the
// calling thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace scenrep

#endif  // SCENREP_PARALLEL_HPP
