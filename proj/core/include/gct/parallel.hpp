#pragma once

#include <cstddef>
#include <functional>

namespace gct {

/// Worker count: `requested` if positive, else GCT_THREADS, else 1.
unsigned resolve_threads(int requested = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; callers write results into per-index slots so the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace gct
