#pragma once

// Index-parallel loop. Each index writes only its own output slot, so the
// result does not depend on scheduling. FOLIATION_THREADS caps the worker
// count; the default is the hardware concurrency.

#include <cstddef>
#include <functional>

namespace charfol {

/// Number of workers parallel_for will use.
unsigned worker_count();

/// Runs body(i) for i in [0, n). The first exception thrown by any index is
/// rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace charfol
