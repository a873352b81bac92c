#pragma once

#include <cstddef>
#include <functional>

// Work partitioning that is invariant to the number of threads: ranges are
// chunked by a fixed chunk size, chunks may run on any thread, and callers
// combine per-chunk results in chunk order. EEGCLF_THREADS caps the pool
// (read per call, so tests can flip it); default is the hardware count.

namespace eegclf {

std::size_t max_threads();

// Runs fn(chunk_index, begin, end) for consecutive [begin, end) chunks of
// size chunk covering [0, n). fn must only touch chunk-local state.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Convenience: one item per chunk.
void parallel_items(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace eegclf
