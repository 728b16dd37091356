#pragma once

#include <cstddef>
#include <functional>

namespace delaysync {

/// Worker count used when a caller passes jobs <= 0.
int default_jobs();

/// Runs fn(i) for every i in [0, count) on at most `jobs` threads. Each index
/// is visited exactly once; completion order is unspecified. The first
/// exception thrown by a task is rethrown after all workers have joined.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace delaysync
