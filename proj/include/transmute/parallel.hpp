#pragma once

#include <cstddef>
#include <functional>

namespace transmute {

/// Worker count: hardware concurrency, capped by TRANSMUTE_THREADS when set.
std::size_t thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads.
/// Indices are handed out in contiguous blocks; the first exception thrown
/// by any worker is rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace transmute
