#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace needlelab {

/// Global worker count (CLI --threads / NEEDLELAB_THREADS); 0 = hardware.
void set_thread_count(int n);
int thread_count();

/// Index-parallel loop: workers own disjoint index ranges and write only to
/// their own slots, so results are identical for every thread count.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    const int tc = thread_count();
    if (tc <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(tc, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace needlelab
