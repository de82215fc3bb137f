#include "viab/common.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace viab {

void parallel_for(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body)
{
    const std::size_t width = std::max<std::size_t>(1, std::min<std::size_t>(exec.workers, n));
    if (width <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    // Small chunks keep the load balanced when per-node cost varies a lot
    // (nodes that exit early vs nodes that run to the horizon).
    const std::size_t chunk = std::max<std::size_t>(1, n / (width * 16));

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
                return;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(width);
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
    pool.clear();  // joins

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace viab
