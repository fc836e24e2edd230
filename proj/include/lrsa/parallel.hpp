#pragma once

// Execution-mode switch for the per-gene map. The OpenMP path writes each
// gene's result into its own preallocated slot, so output is identical to
// the serial reference regardless of worker count; the serial path is kept
// as the reference implementation for tests and benchmarks.

#include <cstddef>
#include <exception>
#include <functional>
#include <string>

#include "lrsa/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lrsa {

enum class ExecMode { serial, openmp };

inline const char* to_string(ExecMode mode) {
    return mode == ExecMode::serial ? "serial" : "openmp";
}

inline int worker_count(ExecMode mode) {
#ifdef _OPENMP
    return mode == ExecMode::openmp ? omp_get_max_threads() : 1;
#else
    (void)mode;
    return 1;
#endif
}

// Index map with deterministic per-slot writes. Exceptions thrown by the
// body are captured and rethrown on the calling thread (first index wins).
template <typename Fn>
void parallel_for_index(std::size_t n, ExecMode mode, Fn&& body) {
#ifdef _OPENMP
    if (mode == ExecMode::openmp) {
        std::exception_ptr first_error = nullptr;
        std::size_t first_error_index = n;
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(lrsa_parallel_error)
                {
                    if (static_cast<std::size_t>(i) < first_error_index) {
                        first_error = std::current_exception();
                        first_error_index = static_cast<std::size_t>(i);
                    }
                }
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#endif
    (void)mode;
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}
