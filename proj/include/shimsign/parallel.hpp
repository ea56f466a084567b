#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace shimsign {

inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Splits [begin, end) into at most `threads` contiguous blocks and runs
/// `fn(lo, hi, block_index)` on each. Block boundaries depend only on the
/// range and thread count, so callers that merge per-block results in block
/// order get deterministic output.
template <class Fn>
void parallel_blocks(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
    if (end <= begin) {
        return;
    }
    const std::size_t n = end - begin;
    const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (blocks == 1) {
        fn(begin, end, std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(blocks);
    pool.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = begin + n * b / blocks;
        const std::size_t hi = begin + n * (b + 1) / blocks;
        pool.emplace_back([&, lo, hi, b] {
            try {
                fn(lo, hi, b);
            } catch (...) {
                errors[b] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Number of blocks parallel_blocks will use for the same arguments.
inline std::size_t block_count(std::size_t begin, std::size_t end, unsigned threads) {
    if (end <= begin) {
        return 0;
    }
    return std::max<std::size_t>(1, std::min<std::size_t>(threads, end - begin));
}

}  // namespace shimsign
