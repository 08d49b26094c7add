#pragma once

#include <cstddef>
#include <functional>

namespace vacufix {

// Worker count: hardware concurrency, capped by VACUFIX_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
// visited exactly once; callers write results into pre-sized slots so the
// output order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace vacufix
