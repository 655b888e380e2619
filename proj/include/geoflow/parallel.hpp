#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace geoflow {

/// Worker count: GEOFLOW_THREADS caps it, 0/unset means hardware default.
inline unsigned thread_count() {
    static const unsigned n = [] {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("GEOFLOW_THREADS")) {
            long v = std::strtol(env, nullptr, 10);
            if (v > 0) return std::min<unsigned>(static_cast<unsigned>(v), 256u);
        }
        return std::min(hw, 32u);
    }();
    return n;
}

/// Runs fn(begin, end) over a partition of [0, n). Chunks are contiguous and
/// the partition does not depend on the thread count, so per-chunk results
/// (when indexed by position) are reproducible.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    unsigned workers = thread_count();
    if (workers <= 1 || n < 4096) {
        fn(std::size_t{0}, n);
        return;
    }
    workers = std::min<std::size_t>(workers, n);
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        std::size_t lo = t * chunk;
        if (lo >= n) break;
        std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &fn] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace geoflow
