#pragma once

#include <cstddef>
#include <functional>

namespace bravl {

/// Worker cap: min(hardware_concurrency, BRAVL_THREADS if set). At least 1.
int worker_count();

/// Runs fn(i) for i in [0, n) across workers with static block partitioning.
/// Callers must write to disjoint locations only; output is then identical
/// for any worker count. Exceptions from fn propagate to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace bravl
