#pragma once

#include <cstddef>
#include <functional>

namespace vibronic {

/// Runs fn(0..n-1) on up to `threads` workers (threads <= 1 runs inline).
/// Callers write results by index, so output order never depends on scheduling.
/// The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace vibronic
