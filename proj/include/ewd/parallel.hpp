#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ewd {

inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs body(i) for i in [0, n). Work items must be independent and write only
// to their own slots so results match the serial order exactly.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace ewd
