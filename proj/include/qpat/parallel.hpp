#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qpat
{
//! Worker count used by parallel_for (default 1). Results never depend on it.
void set_thread_count(int n);
int thread_count();

/*!
 * Call body(i) for i in [0, n) over contiguous static blocks.
 *
 * Each index must write only to its own output slots; the first exception
 * thrown by any worker is rethrown on the calling thread.
 */
template<class Body>
void parallel_for(std::size_t n, Body&& body)
{
    std::size_t workers = static_cast<std::size_t>(thread_count());
    if (workers <= 1 || n < 2)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            body(i);
        }
        return;
    }
    workers = std::min(workers, n);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        std::size_t begin = n * w / workers;
        std::size_t end = n * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try
            {
                for (std::size_t i = begin; i < end; ++i)
                {
                    body(i);
                }
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
    {
        th.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

}  // namespace qpat
