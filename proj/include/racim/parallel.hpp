#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace racim {

/// Worker cap: min(hardware_concurrency, RAND_ACIM_THREADS if set).
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RAND_ACIM_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

/// Runs fn(chunk_index, begin, end) over [0, n) split into contiguous chunks,
/// one per worker. Chunk boundaries depend only on n and the worker count, so
/// callers that combine per-chunk results in chunk order stay deterministic.
inline void parallel_chunks(
    std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    unsigned workers = worker_count();
    std::size_t chunks = std::min<std::size_t>(workers, std::max<std::size_t>(n, 1));
    if (chunks <= 1) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t b = n * c / chunks;
        std::size_t e = n * (c + 1) / chunks;
        pool.emplace_back([&fn, c, b, e] { fn(c, b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace racim
