#pragma once

#include <cstddef>
#include <functional>

namespace acnet {

//! Worker count: ACNET_WORKERS if set to a positive integer, else the
//! hardware concurrency (at least 1).
int worker_count();

//! Splits [0, n) into contiguous chunks, one per worker, and runs
//! body(begin, end, worker) on each. Chunk boundaries depend only on n and the
//! worker count; callers that need reproducible reductions should write
//! per-index results and reduce them in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, int)>& body);

} // namespace acnet
