#include "phreg/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace phreg::parallel {

int thread_limit() {
    if (const char* env = std::getenv("PHREG_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

void configure_from_env() { omp_set_num_threads(thread_limit()); }

namespace detail {

void run_indexed(std::size_t count, void (*body)(std::size_t, void*), void* ctx, std::vector<std::exception_ptr>& errors) {
    const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i), ctx);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
}

}  // namespace detail
}  // namespace phreg::parallel
