#pragma once

#include <cstdint>
#include <functional>

namespace lubrex {

/// Worker count: min(hardware_concurrency, LUBREX_THREADS if set).
int worker_count();

/// Runs body(i) for i in [begin, end) on the worker pool. Iterations must be
/// independent; results are deterministic because each index owns its output.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& body);

}  // namespace lubrex
