#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace cmvlab {

/// Number of workers to use for a request of `threads` (≤ 0 means all hardware threads).
inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// out[i] = task(i) for i < count, spread over `threads` workers.
///
/// Results are stored by index, so anything reduced from them in index order is identical for every
/// worker count. If tasks throw, the exception of the lowest failing index is rethrown.
template <class Task>
auto parallel_map(std::size_t count, int threads, Task&& task) -> std::vector<std::invoke_result_t<Task&, std::size_t>> {
    using R = std::invoke_result_t<Task&, std::size_t>;
    static_assert(!std::is_same_v<R, bool>, "vector<bool> elements cannot be written concurrently");
    std::vector<R> out(count);
    const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(count, 1))));
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::size_t err_index = count;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace cmvlab
