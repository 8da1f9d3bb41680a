/// @file parallel.hpp
/// @brief Minimal fork-join helper over independent work items.
#pragma once

#include <cstddef>
#include <functional>

namespace mgfno {

/// Worker cap from MGFNO_THREADS, else the hardware concurrency (at least 1).
std::size_t default_threads();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Items are
/// handed out in contiguous blocks; the first exception thrown is rethrown
/// after all workers join. With threads <= 1 runs inline in index order.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace mgfno
