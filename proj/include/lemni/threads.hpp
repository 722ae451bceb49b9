#pragma once

#include <functional>

namespace lemni {

// Number of worker threads to use: `requested` if positive, otherwise the
// LEMNI_THREADS environment variable, otherwise hardware concurrency.
// All parallel loops in this library partition work so results are
// bit-identical at any thread count.
int resolve_thread_count(int requested = 0);

// Runs fn(0..n-1), possibly across `threads` workers.  fn must not throw.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace lemni
