// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cbo {

/// Fixed chunk length for every reduction and parallel map. Chunk boundaries
/// never depend on the worker count, which keeps results bit-identical
/// across parallel configurations.
inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t n) noexcept {
  return (n + kChunkSize - 1) / kChunkSize;
}

/// Persistent pool of helper threads. `run` hands out task indices
/// dynamically; callers must make each task's result independent of which
/// thread executes it.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  /// Total number of workers including the calling thread.
  std::size_t size() const noexcept { return helpers_.size() + 1; }

  /// Runs task(0) ... task(tasks - 1) and blocks until all finished. If any
  /// task throws, the exception of the lowest failing index is rethrown.
  void run(std::size_t tasks, const std::function<void(std::size_t)>& task);

 private:
  void helper_loop();
  void drain();

  std::vector<std::thread> helpers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t tasks_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t busy_ = 0;
  std::uint64_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
  std::size_t error_task_ = 0;
};

/// Runs body(begin, end, chunk) over [0, n) in kChunkSize pieces, on `pool`
/// when given, otherwise inline.
void for_each_chunk(WorkerPool* pool, std::size_t n,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Worker count from CBO_LAB_WORKERS, or 1 when unset or malformed.
std::size_t default_worker_count();

}  // namespace cbo
