#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace salem {

// Worker-count policy: explicit set_thread_count(n) wins, then SALEM_LAB_THREADS,
// then the hardware count.  Results never depend on the value: parallel_for only
// partitions index ranges whose bodies write disjoint slots.
inline std::atomic<int>& thread_count_slot() {
    static std::atomic<int> count{0};
    return count;
}

inline void set_thread_count(int n) { thread_count_slot().store(n < 0 ? 0 : n); }

inline int thread_count() {
    int n = thread_count_slot().load();
    if (n > 0) return n;
    if (const char* env = std::getenv("SALEM_LAB_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Static block partition of [0, count); body(i) must touch only slot i.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    const int workers = std::min<std::size_t>(std::size_t(thread_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = count * std::size_t(w) / std::size_t(workers);
        const std::size_t hi = count * std::size_t(w + 1) / std::size_t(workers);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace salem
