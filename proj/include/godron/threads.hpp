#pragma once
#include <cstddef>
#include <functional>

namespace godron {

// Worker count: min(hardware, GODRON_THREADS) with GODRON_THREADS read once.
int workerCount();

// Run fn(i) for i in [0, n). Work is split into contiguous chunks; each
// index writes only its own slot in caller-owned storage, so results are
// deterministic regardless of scheduling. Runs inline when n is small or
// only one worker is configured. Exceptions propagate from the first
// failing index (by index order).
void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace godron
