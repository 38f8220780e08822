#pragma once

#include <functional>

namespace polyfk {

// Worker count from POLYFK_THREADS (default: hardware concurrency, capped).
int thread_count();

// Chunked parallel loop over [0, n). Work items must not write shared state;
// callers scatter results serially afterwards so runs are bit-identical to
// the serial path.
void parallel_for(int n, const std::function<void(int)> &body);

} // namespace polyfk
