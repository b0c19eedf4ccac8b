#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace csplab {

inline int default_workers() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n).
// Chunk boundaries depend only on n, so per-chunk results are identical for
// any worker count; the caller merges chunk outputs in chunk order.
template <typename Fn>
void parallel_chunks(std::size_t n, int workers, std::size_t chunk_size, Fn fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    if (workers <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks || failed.load()) return;
            try {
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int nw = std::min<std::size_t>(workers, n_chunks);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load() && err) std::rethrow_exception(err);
}

}  // namespace csplab
