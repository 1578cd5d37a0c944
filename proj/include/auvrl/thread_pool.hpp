#ifndef AUVRL_THREAD_POOL_HPP_
#define AUVRL_THREAD_POOL_HPP_

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace auvrl {

// Fixed pool that runs one contiguous chunk of an index range per worker.
// The calling thread executes chunk 0, so a pool of size 1 spawns nothing.
class ThreadPool {
 public:
  // num_workers <= 0 selects std::thread::hardware_concurrency().
  explicit ThreadPool(int num_workers = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()) + 1; }

  // Calls fn(begin, end) on disjoint chunks covering [0, n) and blocks
  // until all chunks have finished.
  void ParallelFor(std::size_t n,
                   const std::function<void(std::size_t, std::size_t)>& fn);

 private:
  void WorkerLoop(int worker);

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t)>* task_ = nullptr;
  std::size_t task_size_ = 0;
  std::size_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace auvrl

#endif  // AUVRL_THREAD_POOL_HPP_
