#pragma once

#include <functional>

namespace aniso {

/// Worker count: the ANISO_THREADS environment variable when set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
[[nodiscard]] int thread_count();

/// Runs body(k) for k in [0, n). Each index runs exactly once; results must
/// be written to per-index slots so the outcome is independent of the
/// schedule. Calls nested inside a worker run serially. The first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace aniso
