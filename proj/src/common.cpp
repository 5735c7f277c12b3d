#include "spdecpt/common.hpp"

#include <algorithm>
#include <atomic>

namespace spdecpt {

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body,
                  unsigned threads) {
    if (begin >= end) return;
    const std::size_t count = end - begin;
    unsigned n = std::min<std::size_t>(resolve_threads(threads), count);
    if (n <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= end) break;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace spdecpt
