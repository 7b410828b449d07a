#pragma once

#include <cstddef>
#include <functional>

namespace hv3d {

/// Worker cap from HV3D_THREADS (positive integer), else the hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write results by index, so the outcome does
/// not depend on scheduling. If several calls throw, the exception from the lowest index is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace hv3d
