#pragma once

#include <cstddef>
#include <functional>

namespace tte {

/// Worker cap: TTE_MAX_PARALLELISM when set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t max_parallelism();

/// Runs fn(0) ... fn(n-1) on up to max_parallelism() threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tte
