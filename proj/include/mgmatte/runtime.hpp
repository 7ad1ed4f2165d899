#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace mgmatte {

// Process-wide execution settings. Parallelism is opt-in and limited to
// operations whose output partitions by row (spmv, Jacobi, window stats),
// so results are bit-identical at any thread count.
struct Runtime {
    static int& threads() {
        static int n = 1;
        return n;
    }
    // Reserved switch: all provided kernels are deterministic by
    // construction, so this currently gates nothing.
    static bool& deterministic() {
        static bool d = true;
        return d;
    }
};

// Splits [0, count) into contiguous chunks, one per worker.
// fn(begin, end) must only write state owned by its own range.
template <typename Fn>
void parallel_for_rows(int count, Fn&& fn) {
    const int workers = std::min(Runtime::threads(), count);
    if (workers <= 1 || count <= 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mgmatte
