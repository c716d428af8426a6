#pragma once

// Index-keyed worker pool: fn(i) runs once for every i in [0, count) on up to
// `workers` threads. Results are whatever fn writes into slot i, so output
// never depends on scheduling. The lowest-index exception is rethrown.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace doiflow {

inline std::size_t default_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

template <typename F>
void parallel_for(std::size_t count, std::size_t workers, F&& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min(std::max<std::size_t>(workers, 1), count);
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace doiflow
