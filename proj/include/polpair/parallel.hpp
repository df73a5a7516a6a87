#pragma once

#include <cstddef>
#include <functional>

namespace polpair {

// Hardware concurrency, at least 1.
unsigned default_thread_count();

/*!
 * Runs body(i) for i in [0, n) on up to `threads` threads.
 *
 * Indices are split into contiguous blocks, one per thread. The body must
 * only write to storage owned by index i; results are then independent of
 * the thread count. If any call throws, the exception of the lowest failing
 * index is rethrown after all threads have joined.
 */
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace polpair
