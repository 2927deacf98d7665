#pragma once

#include <cstddef>
#include <functional>

namespace terracut {

/// Worker count from TERRACUT_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, count). Iterations must write to disjoint
/// outputs; results are then independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace terracut
