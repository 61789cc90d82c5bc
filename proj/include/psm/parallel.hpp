#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace psm {

// Static row partition over a fixed thread count. Each index is visited by
// exactly one worker and results go to caller-owned slots, so output is
// identical for any thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, int)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i, 0);
        return;
    }
    const int nt = static_cast<int>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = n * t / nt, hi = n * (t + 1) / nt;
            for (std::size_t i = lo; i < hi; ++i) body(i, t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace psm
