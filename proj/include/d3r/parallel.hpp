#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace d3r {

// Process-wide worker count. Results are bit-identical for any setting:
// parallel regions split work into disjoint output ranges, and every output
// element is accumulated in the same order regardless of the thread count.
void set_num_threads(int n);
int num_threads();

// Runs fn(i) for i in [begin, end), split into contiguous chunks.
template <typename F>
void parallel_for(long begin, long end, F&& fn) {
    const long n = end - begin;
    if (n <= 0) return;
    const int workers = std::min<long>(num_threads(), n);
    if (workers <= 1) {
        for (long i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    const long chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const long lo = begin + t * chunk;
        const long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace d3r
