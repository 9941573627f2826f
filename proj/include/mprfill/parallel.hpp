#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace mprfill {

// Worker count; 0 means "use hardware concurrency".
struct Threads {
    unsigned count = 0;

    unsigned resolve() const noexcept {
        if (count > 0) return count;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

// Runs fn(i) for i in [0, n) over `threads` workers with static contiguous
// chunking. Each index must write only state it owns; the result is then
// independent of the worker count.
template <class Fn>
void parallel_for(std::size_t n, Threads threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(threads.resolve(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Pairwise (tree) summation with a fixed shape determined only by the input
// length: bitwise reproducible for a given sequence of partial sums.
inline double pairwise_sum(std::span<const double> xs) noexcept {
    if (xs.empty()) return 0.0;
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace mprfill
