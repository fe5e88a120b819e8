#pragma once

#include <cstddef>
#include <functional>

namespace ts {

// Process-wide worker count used by the dense loops of the library (default 1).
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker and
// writes only its own outputs, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ts
