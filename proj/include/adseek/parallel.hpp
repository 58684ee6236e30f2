#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adseek {

/// Number of workers for a `jobs` request; 0 means hardware concurrency.
inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    return jobs;
}

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads. Results keep index
/// order regardless of scheduling. The first exception thrown by any task is
/// rethrown after all workers finish.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t n, unsigned jobs, Fn&& fn) {
    std::vector<Result> out(n);
    const unsigned workers = std::min<unsigned>(resolve_jobs(jobs), static_cast<unsigned>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

}  // namespace adseek
