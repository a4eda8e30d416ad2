#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pointamp {

// Effective worker count: POINTAMP_THREADS overrides, 0 means auto.
inline int resolve_threads(int requested) {
    if (const char* env = std::getenv("POINTAMP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(job) for job in [0, job_count) across `threads` workers. Jobs are
// claimed from a shared counter; callers must make jobs write to disjoint
// state so the schedule cannot affect results.
template <typename Fn>
void parallel_for(std::size_t job_count, int threads, Fn&& fn) {
    if (job_count == 0) return;
    if (threads <= 1 || job_count == 1) {
        for (std::size_t i = 0; i < job_count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= job_count) return;
            fn(i);
        }
    };
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(threads), job_count);
    std::vector<std::thread> pool;
    pool.reserve(n - 1);
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

}  // namespace pointamp
