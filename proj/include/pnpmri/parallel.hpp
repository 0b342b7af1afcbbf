#pragma once

#include <cstddef>
#include <functional>

namespace pnpmri {

/// Global worker-thread cap for data-parallel loops (default 1 = serial).
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, count). Tasks must write only to their own output
// slot; any cross-task reduction happens serially afterwards, so results are
// identical for every thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace pnpmri
