#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace vwm {

/// Runs fn over [begin, end) split into up to `threads` contiguous chunks.
/// Chunks are disjoint, so any kernel writing disjoint outputs per index is
/// bit-identical across thread counts.
inline void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const std::int64_t n = end - begin;
    if (n <= 0) return;
    if (threads < 1) threads = 1;
    if (threads == 1 || n == 1) {
        fn(begin, end);
        return;
    }
    const std::int64_t chunks = std::min<std::int64_t>(threads, n);
    std::vector<std::thread> workers;
    workers.reserve(std::size_t(chunks));
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::int64_t lo = begin + n * c / chunks;
        const std::int64_t hi = begin + n * (c + 1) / chunks;
        workers.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace vwm
