#pragma once

#include <cstddef>
#include <functional>

namespace feedmix {

/// Worker count: FEEDMIX_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Callers
/// write results into per-index slots so reduction order stays fixed.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace feedmix
