#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace treecast::harness {

// Evaluates f(i) for i in [0, n) on `workers` threads and returns the
// results in index order. Results never depend on the worker count as long
// as f(i) is a pure function of i.
template <class T, class F>
std::vector<T> run_indexed(std::uint64_t n, unsigned workers, F&& f) {
    std::vector<T> out(n);
    workers = std::max(1U, workers);
    if (workers == 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::uint64_t chunk = std::max<std::uint64_t>(1, n / (std::uint64_t{workers} * 16));
    auto body = [&] {
        try {
            for (;;) {
                const std::uint64_t start = next.fetch_add(chunk);
                if (start >= n) break;
                const std::uint64_t stop = std::min(n, start + chunk);
                for (std::uint64_t i = start; i < stop; ++i) out[i] = f(i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace treecast::harness
