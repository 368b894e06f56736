#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace asgl {

/// Runs fn(i) for i in [0, count) on up to num_threads workers.
/// Exceptions are captured and the first one rethrown in the caller.
inline void parallel_for(std::size_t count, unsigned num_threads,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (num_threads == 0) num_threads = std::thread::hardware_concurrency();
    num_threads = std::max(1u, std::min<unsigned>(num_threads,
                                                  static_cast<unsigned>(count)));
    if (num_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < num_threads; ++t) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace asgl
