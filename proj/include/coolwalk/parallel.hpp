#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coolwalk {

/// Execution policy for batch kernels. `serial` is the reference path kept
/// for testing; `parallel` distributes independent cells over OpenMP threads.
/// Cells write to their own output slot, so both paths give identical bytes.
enum class Exec { serial, parallel };

inline void set_thread_count(int threads)
{
#ifdef _OPENMP
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

inline int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(i) for i in [0, count). Exceptions thrown inside a parallel region
/// are captured and the first one is rethrown after the loop.
template <class Fn>
void for_each_cell(std::size_t count, Exec exec, Fn&& fn)
{
    if (exec == Exec::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(guard);
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace coolwalk
