#pragma once

#include <cstddef>
#include <functional>

namespace sketch_sfa::verify {

/// Worker count for `tasks` independent jobs: hardware concurrency, capped by
/// the SKETCH_SFA_THREADS environment variable and by `tasks`. At least 1.
std::size_t worker_count(std::size_t tasks);

/// Runs body(0) .. body(count - 1) on worker_count(count) threads. Each index
/// runs exactly once; the first exception thrown is rethrown after all
/// workers stop. Bodies must not share mutable state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sketch_sfa::verify
