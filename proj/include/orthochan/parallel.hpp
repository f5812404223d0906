#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace orthochan {

// Worker count: the programmatic override if set, else ORTHOCHAN_THREADS,
// else std::thread::hardware_concurrency().
std::size_t thread_count();

// Scoped override of thread_count(), mostly for tests.
class ThreadCountOverride {
 public:
  explicit ThreadCountOverride(std::size_t threads);
  ~ThreadCountOverride();
  ThreadCountOverride(const ThreadCountOverride&) = delete;
  ThreadCountOverride& operator=(const ThreadCountOverride&) = delete;

 private:
  std::optional<std::size_t> previous_;
};

// Runs body(i) for every i in [0, count). Work is handed out in contiguous
// chunks; body must only write to slots owned by index i, which keeps results
// independent of scheduling. Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace orthochan
