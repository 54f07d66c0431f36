#pragma once

#include <functional>

namespace causalflow {

// Effective worker count: `requested` (0 = hardware concurrency), capped by
// the CAUSALFLOW_THREADS environment variable when set.
int resolve_threads(int requested);

// Runs body(0..n-1) on a bounded worker pool. Exceptions are rethrown in the
// calling thread after all workers join.
void parallel_for(int n, const std::function<void(int)>& body, int threads = 0);

}  // namespace causalflow
