#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace calibra {

/// Worker cap: CALIBRA_THREADS when set, hardware concurrency otherwise.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("CALIBRA_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs f(i) for i in [0, count). Results must be written to pre-sized slots
/// so the merge step stays deterministic regardless of thread count.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(thread_cap(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace calibra
