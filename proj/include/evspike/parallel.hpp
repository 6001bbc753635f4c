#pragma once

#include <functional>

namespace evspike {

// Fixed chunking used everywhere samples are processed in parallel. Results
// are stored per chunk and reduced in chunk order, so a run's output depends
// only on the chunk size, never on the worker count or scheduling.
inline constexpr int kSampleChunk = 8;

// Splits [0, n) into chunks of `chunk_size` and runs fn(chunk_index, begin,
// end) across up to `workers` threads. fn must only touch state owned by its
// chunk index. Exceptions from fn are rethrown on the caller's thread.
void parallel_chunks(int n, int chunk_size, int workers,
                     const std::function<void(int, int, int)>& fn);

inline int num_chunks(int n, int chunk_size) {
  return n <= 0 ? 0 : (n + chunk_size - 1) / chunk_size;
}

}  // namespace evspike
