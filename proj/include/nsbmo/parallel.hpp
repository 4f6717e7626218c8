#pragma once

#include <cstddef>
#include <functional>

namespace nsbmo {

// Every parallel loop in the library writes one output slot per index, so
// results never depend on the worker count.

/// Caps the number of worker threads used by parallel_for (0 = hardware default).
void set_thread_count(int threads);
int thread_count();

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nsbmo
