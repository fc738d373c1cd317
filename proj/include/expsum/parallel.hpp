#pragma once

#include <cstddef>
#include <functional>

namespace expsum {

// Worker count used by parallel_for. 0 restores the default: EXPSUM_THREADS
// if set, otherwise the hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Runs body(i) for i in [0, count). Index i always goes to worker i % threads
// and bodies write to disjoint slots, so results never depend on the thread
// count. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace expsum
