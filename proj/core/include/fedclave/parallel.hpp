#pragma once

#include <cstddef>
#include <functional>

namespace fedclave {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
// executed exactly once; callers write results into per-index slots so the
// outcome is independent of scheduling. The exception thrown by the lowest
// failing index (if any) is rethrown after all workers join.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& body);

}  // namespace fedclave
