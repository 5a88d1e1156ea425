#ifndef STW_PARALLEL_HPP
#define STW_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stw {

/// Runs fn(i) for i in [0, count) across worker threads. Each index must
/// write to disjoint storage; results are then independent of scheduling.
/// n_threads = 0 uses the hardware concurrency.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned n_threads = 0) {
    if (count == 0) return;
    unsigned workers = n_threads ? n_threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > count) workers = static_cast<unsigned>(count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace stw

#endif
