#pragma once

#include <cstddef>
#include <functional>

namespace lgw {

/// Number of worker threads to use when a config asks for "auto" (0).
std::size_t hardware_threads();

/// Runs fn(i) for i in [0, n) across at most `threads` workers. Iterations
/// are split into contiguous static blocks, one per worker, so any
/// per-iteration output written to disjoint slots lands identically no
/// matter how many threads run. fn must not touch shared mutable state.
/// Exceptions thrown by fn are captured and rethrown on the calling thread
/// (the first one in iteration order wins).
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace lgw
