#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace mscbf {

/// Order-independent parallel map over task indices.  Results must be
/// written into per-index slots so the reduction is deterministic no matter
/// the worker count or scheduling.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (workers == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int lanes = std::min(workers, n);
    pool.reserve(static_cast<std::size_t>(lanes));
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < lanes; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n || failed.load()) break;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mscbf
