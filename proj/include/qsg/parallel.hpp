// Minimal work distribution for embarrassingly parallel trials: each task
// owns its index (and therefore its derived rng stream), so results never
// depend on the worker count.

#pragma once

#include <cstddef>
#include <functional>

namespace qsg {

// Number of workers to use: explicit request, else the QSG_WORKERS
// environment variable, else hardware concurrency (at least 1).
unsigned resolve_workers(unsigned requested = 0);

// Runs fn(0..count-1) across `workers` threads (inline when workers <= 1).
// Exceptions from tasks are rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace qsg
