#pragma once

#include <cstddef>
#include <functional>

namespace deforma {

/// Worker cap from DEFORMA_THREADS (unset or 0 means hardware concurrency).
std::size_t worker_count();

/// Runs `body(begin, end)` over contiguous chunks of [0, n). Chunk boundaries
/// depend only on `n` and the worker count, never on scheduling, so callers
/// that reduce per-index results in index order stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace deforma
