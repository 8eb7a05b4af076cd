#pragma once

#include <cstdint>
#include <functional>

namespace campo {

// Process-wide worker count: 0 = hardware concurrency, 1 = serial. Affects
// speed only; all parallel loops produce thread-count-independent output.
void set_thread_count(int n);
int thread_count();

// Splits [0, n) into fixed-size chunks (chunking depends only on n and
// chunk_size, never on the worker count) and runs fn(chunk_index, begin, end)
// over them. Chunks write disjoint output ranges; reductions should store
// per-chunk partials indexed by chunk_index and fold them in order.
void parallel_chunks(int64_t n, int64_t chunk_size,
                     const std::function<void(int64_t, int64_t, int64_t)>& fn);

}  // namespace campo
