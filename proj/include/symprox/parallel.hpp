#pragma once

#include <cstddef>
#include <functional>

namespace symprox {

// Worker cap. Defaults to SYMPROX_THREADS if set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [0, n). If any call throws, the exception from the
// smallest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace symprox
