#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace phreg::parallel {

/// Thread cap from PHREG_THREADS, or the OpenMP default when unset/invalid.
int thread_limit();

/// Applies thread_limit() to the OpenMP runtime.
void configure_from_env();

namespace detail {
void run_indexed(std::size_t count, void (*body)(std::size_t, void*), void* ctx, std::vector<std::exception_ptr>& errors);
}

/// Runs fn(i) for i in [0, count) on the OpenMP team. The first exception
/// (lowest index) is rethrown after the loop finishes.
template <typename Fn>
void for_each_index(std::size_t count, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
    auto trampoline = [](std::size_t i, void* ctx) { (*static_cast<Fn*>(ctx))(i); };
    detail::run_indexed(count, trampoline, &fn, errors);
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace phreg::parallel
