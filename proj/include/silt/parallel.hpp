#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace silt {

/// Runs fn(i) for i in [0,n) on up to `jobs` threads.
///
/// Work is pre-partitioned into contiguous index blocks, so each index is
/// processed exactly once and writers that target per-index slots never
/// race. Callers must reduce results in index order themselves; that keeps
/// output bit-identical for any job count.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace silt
