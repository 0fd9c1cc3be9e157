#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace gapscope {

// Static-chunked parallel loop; fn(i) must be pure per index so results are
// deterministic regardless of thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
    unsigned tc = threads > 0 ? static_cast<unsigned>(threads)
                              : std::thread::hardware_concurrency();
    if (tc <= 1 || n < 2 * tc) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(tc);
    for (unsigned t = 0; t < tc; ++t) {
        pool.emplace_back([&fn, t, tc, n] {
            for (std::size_t i = t; i < n; i += tc) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace gapscope
