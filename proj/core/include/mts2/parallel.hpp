#pragma once

#include <functional>

namespace mts2 {

/// Runs fn(0..count-1), splitting the range over up to `threads` workers.
/// Serial when threads <= 1. Exceptions from workers are rethrown on the
/// calling thread (first one wins).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace mts2
