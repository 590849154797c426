#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace hj {

inline unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Runs fn(begin, end) over a static block partition of [0, count). Blocks are
// assigned by worker index, so any index-addressed output assembly is
// deterministic regardless of scheduling. Worker exceptions are captured and
// the first one is rethrown after the join.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    const auto workers = static_cast<std::size_t>(std::max(1u, threads));
    if (workers == 1 || count == 1) {
        fn(static_cast<std::size_t>(0), count);
        return;
    }
    const std::size_t used = std::min(workers, count);
    const std::size_t block = count / used;
    const std::size_t rem = count % used;

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(used);
    pool.reserve(used);
    std::size_t begin = 0;
    for (std::size_t w = 0; w < used; ++w) {
        const std::size_t len = block + (w < rem ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&fn, &errors, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace hj
