// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_PARALLEL_HPP
#define EIK_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace eik {

/// Global worker count. Set from --threads or EIK_THREADS; EIK_THREADS wins.
inline int& thread_count() {
    static int n = [] {
        if (const char* env = std::getenv("EIK_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return n;
}

inline void set_thread_count(int n) {
    if (n >= 1) thread_count() = n;
}

/// Run fn(i0, i1) over a partition of [0, n). Chunk boundaries depend only on
/// n and the worker count, and callers that reduce must do so per fixed unit
/// (e.g. per row) so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = std::min<std::size_t>(thread_count(), n ? n : 1);
    if (workers <= 1 || n == 0) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const std::size_t i0 = std::min(n, t * chunk);
        const std::size_t i1 = std::min(n, i0 + chunk);
        if (i0 >= i1) break;
        pool.emplace_back([&fn, i0, i1] { fn(i0, i1); });
    }
    for (auto& th : pool) th.join();
}

} // namespace eik

#endif
