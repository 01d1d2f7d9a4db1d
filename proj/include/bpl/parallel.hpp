#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace bpl {

// process-wide worker count; 0 resolves to hardware concurrency
void set_worker_threads(unsigned n);
unsigned worker_threads();

// chunked index loop; results must be written to disjoint slots so the
// outcome is independent of scheduling
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = worker_threads();
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace bpl
