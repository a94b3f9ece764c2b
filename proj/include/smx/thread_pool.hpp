#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smx {

// Persistent worker pool for data-parallel loops. Tasks must write to
// disjoint slots; results are independent of scheduling, so worker count
// never affects outputs.
class ThreadPool {
 public:
  explicit ThreadPool(int workers);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()) + 1; }

  // Runs fn(0..n-1), blocking until all complete. The calling thread
  // participates.
  void parallel_for(int n, const std::function<void(int)>& fn);

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;

  const std::function<void(int)>* job_ = nullptr;
  int job_size_ = 0;
  std::atomic<int> next_{0};
  int active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

// Helper used throughout: run fn over [0, n) on the pool, or inline when the
// pool is absent or trivial.
void parallel_for(ThreadPool* pool, int n, const std::function<void(int)>& fn);

}  // namespace smx
