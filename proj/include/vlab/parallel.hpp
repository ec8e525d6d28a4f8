#pragma once

#include <cstddef>
#include <functional>

namespace vlab {

// Number of worker threads used by force evaluation and advection (default 1).
void set_num_threads(int n);
int num_threads();

// Calls body(begin, end) on contiguous blocks of [0, n). Blocks are fixed by n and
// the thread count, and each index is handled by exactly one call.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vlab
