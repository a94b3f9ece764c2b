#include "smx/thread_pool.hpp"

#include <atomic>

namespace smx {

ThreadPool::ThreadPool(int workers) {
  const int extra = workers - 1;
  for (int i = 0; i < extra; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::unique_lock lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop() {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(int)>* job = nullptr;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      ++active_;
    }
    for (;;) {
      const int i = next_.fetch_add(1);
      if (i >= job_size_) break;
      (*job)(i);
    }
    {
      std::unique_lock lock(mutex_);
      --active_;
      if (active_ == 0) done_.notify_all();
    }
  }
}

void ThreadPool::parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads_.empty() || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  {
    std::unique_lock lock(mutex_);
    job_ = &fn;
    job_size_ = n;
    next_.store(0);
    ++generation_;
  }
  wake_.notify_all();
  // The caller works too.
  for (;;) {
    const int i = next_.fetch_add(1);
    if (i >= n) break;
    fn(i);
  }
  std::unique_lock lock(mutex_);
  done_.wait(lock, [&] { return active_ == 0; });
  job_ = nullptr;
}

void parallel_for(ThreadPool* pool, int n, const std::function<void(int)>& fn) {
  if (pool && pool->size() > 1) {
    pool->parallel_for(n, fn);
  } else {
    for (int i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace smx
