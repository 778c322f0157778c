#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "phreg/parallel.hpp"

using namespace phreg;

TEST_CASE("PHREG_THREADS caps the team") {
    setenv("PHREG_THREADS", "3", 1);
    CHECK(parallel::thread_limit() == 3);
    setenv("PHREG_THREADS", "zero", 1);
    CHECK(parallel::thread_limit() >= 1);
    unsetenv("PHREG_THREADS");
    CHECK(parallel::thread_limit() >= 1);
}

TEST_CASE("for_each_index visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel::for_each_index(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    std::atomic<int> calls{0};
    parallel::for_each_index(0, [&](std::size_t) { ++calls; });
    CHECK(calls == 0);
}

TEST_CASE("for_each_index rethrows the lowest failing index") {
    try {
        parallel::for_each_index(64, [](std::size_t i) {
            if (i == 40 || i == 13) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "13");
    }
}
