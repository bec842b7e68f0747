#pragma once

#include <cstddef>
#include <functional>

namespace cefsim {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be
// written to per-index slots. The exception of the lowest failing index is
// rethrown after all work has finished.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace cefsim
