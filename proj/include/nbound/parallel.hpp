#pragma once

#include <cstddef>
#include <functional>

namespace nb {

/// Worker count from NB_THREADS (unset or 0 means hardware concurrency).
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Each index
/// must write only its own output slot; results are then independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nb
