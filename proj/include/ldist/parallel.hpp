#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ldist {

inline unsigned default_workers() {
    return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into contiguous chunks, one per worker. `body(begin, end)`
// must only write state addressed by indices in its own chunk, so the result
// does not depend on scheduling. The first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = default_workers()) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (workers <= 1) {
        if (n > 0) body(std::size_t{0}, n);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace ldist
