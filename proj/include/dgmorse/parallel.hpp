#ifndef DGMORSE_PARALLEL_HPP
#define DGMORSE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dgmorse {

/// Environment variable capping the number of worker threads.
inline constexpr const char* workers_env = "DGMORSE_WORKERS";

/// Worker count: DGMORSE_WORKERS if set to a positive integer, otherwise the hardware concurrency.
inline std::size_t worker_count()
{
    if (const char* env = std::getenv(workers_env)) {
        try {
            long n = std::stol(env);
            if (n > 0)
                return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Runs task(i) for 0 ≤ i < n on up to `workers` threads and returns the results in index order,
 * so the output does not depend on scheduling. The first exception thrown by a task is rethrown.
 */
template <class T>
std::vector<T> parallel_indexed(std::size_t n, const std::function<T(std::size_t)>& task, std::size_t workers = worker_count())
{
    std::vector<T> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < std::min(workers, n); ++w)
        pool.emplace_back(run);
    run();
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
    return out;
}

} // namespace dgmorse

#endif // DGMORSE_PARALLEL_HPP
