// Deterministic data-parallel partitioning.
//
// Work is split into contiguous index blocks, one per worker. Callers keep
// per-block outputs and combine them in block order, so results do not
// depend on the number of threads actually used.

#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace bmc {

// Invokes fn(block, begin, end) for each of `blocks` contiguous ranges
// covering [0, total). With threads <= 1 the blocks run inline.
template <typename Fn>
void parallel_blocks(std::size_t total, unsigned threads, Fn&& fn) {
    if (total == 0) return;
    std::size_t blocks = threads == 0 ? 1 : threads;
    if (blocks > total) blocks = total;

    auto block_range = [&](std::size_t b) {
        std::size_t base = total / blocks, rem = total % blocks;
        std::size_t begin = b * base + (b < rem ? b : rem);
        std::size_t end = begin + base + (b < rem ? 1 : 0);
        return std::pair<std::size_t, std::size_t>{begin, end};
    };

    if (blocks == 1) {
        fn(std::size_t{0}, std::size_t{0}, total);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        auto [begin, end] = block_range(b);
        pool.emplace_back([&fn, b, begin, end] { fn(b, begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace bmc
