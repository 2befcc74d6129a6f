// parallel.hpp — Process-wide worker count and a work-sharing parallel loop.

#pragma once

#include <cstddef>
#include <functional>

namespace chainfln {

// 0 selects std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls body(i) for i in [0, n). Iterations are handed out through an atomic
// counter, so body must only write to storage owned by index i. The first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace chainfln
