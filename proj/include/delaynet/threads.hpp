#pragma once

#include <cstddef>
#include <functional>

namespace delaynet {

/// Worker cap: DELAYNET_THREADS if set and positive, otherwise
/// std::thread::hardware_concurrency() (at least 1).
std::size_t max_threads();

/// Runs body(i) for i in [0, count) on up to max_threads() workers.
/// Indices are claimed from a shared counter, so callers must write results
/// into per-index slots to stay deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace delaynet
