#pragma once

#include <cstddef>
#include <functional>

namespace mdshrink {

/// Worker budget: MDSHRINK_THREADS when set (floored at 1), otherwise the
/// hardware concurrency.
int max_workers();

/// Runs body(0) .. body(n-1) on up to max_workers() threads.  Jobs are
/// claimed through a shared counter; the first exception is rethrown after
/// all workers join.  Callers are responsible for making jobs
/// order-independent (preallocated output slots, per-job RNG streams).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mdshrink
