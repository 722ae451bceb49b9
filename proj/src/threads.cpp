#include "lemni/threads.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace lemni {

int resolve_thread_count(int requested) {
    if (requested > 0) return std::min(requested, 256);
    if (const char* env = std::getenv("LEMNI_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return std::min(v, 256);
        // 0 (or junk) falls through to auto
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(std::min(hc, 64u));
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace lemni
