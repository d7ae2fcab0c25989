#ifndef ELCA_PARALLEL_HPP
#define ELCA_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "elca/types.hpp"

namespace elca {

// Calls task(i) for i in [0, n) on up to `threads` workers. Tasks must write
// only to their own slot; the first exception (lowest index) is rethrown
// after all workers join.
template <typename Task>
void parallel_for(Index n, int threads, Task&& task) {
  const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(n, 1));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<Index> next{0};
  auto run = [&] {
    for (Index i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace elca

#endif  // ELCA_PARALLEL_HPP
