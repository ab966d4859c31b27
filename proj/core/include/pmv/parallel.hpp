#pragma once

#include <cstddef>
#include <functional>

namespace pmv {

/// Worker cap: PMV_FORGE_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
int thread_limit();

/// Runs fn(i) for every i in [0, count) on up to thread_limit()
/// workers. fn must be thread-safe; the first exception thrown is
/// rethrown after all workers stop picking up new indices.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pmv
