#pragma once

#include <cstddef>
#include <functional>

namespace lob {

/// Number of worker threads to use. A positive `requested` wins; otherwise
/// LOB_THREADS if set, else std::thread::hardware_concurrency().
unsigned worker_count(unsigned requested = 0);

/// Calls fn(k) for k in [0, n) on up to `threads` workers. Items are handed out
/// through an atomic counter; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lob
