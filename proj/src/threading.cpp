#include "eegclf/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eegclf {

std::size_t max_threads() {
    if (const char* env = std::getenv("EEGCLF_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk == 0) chunk = 1;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const std::size_t threads = std::min(max_threads(), n_chunks);

    auto run_chunk = [&](std::size_t ci) {
        const std::size_t begin = ci * chunk;
        const std::size_t end = std::min(begin + chunk, n);
        fn(ci, begin, end);
    };

    if (threads <= 1) {
        for (std::size_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t ci = next.fetch_add(1);
            if (ci >= n_chunks) return;
            try {
                run_chunk(ci);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void parallel_items(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_chunks(n, 1, [&](std::size_t, std::size_t begin, std::size_t) { fn(begin); });
}

} // namespace eegclf
