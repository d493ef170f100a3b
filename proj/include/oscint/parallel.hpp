#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace oscint {

inline int default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Index-parallel map; each worker claims indices from a shared counter and
// writes only to its own slot, so results are ordered and deterministic
// regardless of the job count.
template <class Fn>
void parallel_for_index(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace oscint
