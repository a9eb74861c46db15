#pragma once

#include <cstddef>
#include <functional>

namespace normscape {

// Thread count: explicit value if nonzero, else NORMSCAPE_THREADS, else hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

// Runs fn(i) for i in [0, n) on a worker pool. Work items write to their own slots, so results
// do not depend on scheduling. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace normscape
