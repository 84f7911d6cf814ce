#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace ecd::detail {

/// Runs fn(i) for every i in [0, n) on up to `threads` workers, each owning a
/// contiguous index block. Callers make fn(i) depend only on i and write to
/// disjoint slots, so the result is identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 2 * threads) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace ecd::detail
