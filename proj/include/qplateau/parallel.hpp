#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qp {

// Worker count: explicit override > QP_THREADS env > hardware concurrency.
// Results of all parallel maps in this project are written to disjoint,
// index-addressed buffers and reduced sequentially, so the count never
// affects any computed value.
inline int& thread_override() {
    static int value = 0;
    return value;
}

inline int thread_count() {
    if (thread_override() > 0) return thread_override();
    if (const char* env = std::getenv("QP_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Chunked parallel loop over [0, n). fn(i) must only touch state owned by
// index i.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int threads = std::min<std::size_t>(thread_count(), n ? n : 1);
    if (threads <= 1 || n < 256) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace qp
