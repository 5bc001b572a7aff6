// runners_impl.hpp: template definitions for runners.hpp

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ncthermo::app {

template <class Fn>
void parallel_for_index(std::size_t n, unsigned workers, Fn&& fn) {
    const std::size_t nthreads = std::min<std::size_t>(std::max(1u, workers), n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < nthreads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace ncthermo::app
