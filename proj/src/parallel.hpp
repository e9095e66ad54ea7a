#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace radsynth {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(begin, end) over contiguous chunks of [0, n). Each chunk's work is
// independent of the worker that executes it, so results cannot depend on
// the thread count.
template <typename Fn>
void parallel_chunks(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        fn(std::int64_t{0}, n);
        return;
    }
    std::int64_t workers = std::min<std::int64_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::int64_t w = 0; w < workers; ++w) {
        std::int64_t begin = n * w / workers;
        std::int64_t end = n * (w + 1) / workers;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace radsynth
