#pragma once

#include <cstddef>
#include <functional>

namespace mfchaos {

/// Thread count from MFCHAOS_THREADS, else the hardware concurrency (>= 1).
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 selects the
/// default). Indices are claimed dynamically, so fn must write only to
/// index-addressed outputs. The exception of the lowest failing index is
/// rethrown, independent of scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mfchaos
