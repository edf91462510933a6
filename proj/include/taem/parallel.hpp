#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace taem {

/// Worker count: TAEM_THREADS if set, otherwise hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("TAEM_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Evaluates f(0..n-1) across threads and returns the results in index
/// order.  Each f(i) must be independent of the others, so the output is
/// the same for any worker count.
template <class F>
auto parallel_map(std::size_t n, F&& f) {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> out(n);
    unsigned workers = std::min<std::size_t>(thread_count(), n ? n : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace taem
