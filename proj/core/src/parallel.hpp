// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace semimesh::detail {

/// Runs fn(chunk) for chunk in [0, chunks) on a small thread pool. Callers that reduce
/// results do so per chunk and combine in chunk order, which keeps output independent of
/// the number of threads.
template <class Fn>
void for_each_chunk(int chunks, Fn&& fn) {
    const int workers = std::min<int>(chunks, static_cast<int>(std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (int c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int c = next++; c < chunks; c = next++) {
                    try {
                        fn(c);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

/// Half-open row range of chunk `c` out of `chunks` over `rows` rows.
inline std::pair<int, int> chunk_rows(int c, int chunks, int rows) {
    return {static_cast<int>(static_cast<long>(rows) * c / chunks),
            static_cast<int>(static_cast<long>(rows) * (c + 1) / chunks)};
}

inline constexpr int kRowChunks = 16;

}  // namespace semimesh::detail
