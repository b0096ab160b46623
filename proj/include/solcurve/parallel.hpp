#ifndef SOLCURVE_PARALLEL_HPP
#define SOLCURVE_PARALLEL_HPP

/// \file parallel.hpp
/// Index-parallel worker pool for the embarrassingly parallel sweeps.
/// Results are written by index, so the merge order is deterministic
/// regardless of the number of workers.

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace solcurve {

template <class Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    std::size_t workers = std::min(static_cast<std::size_t>(jobs), count);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace solcurve

#endif  // SOLCURVE_PARALLEL_HPP
