#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "transmute/parallel.hpp"

using namespace transmute;

TEST_CASE("every index is visited once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("thread cap from the environment") {
  ::setenv("TRANSMUTE_THREADS", "1", 1);
  CHECK(thread_count() == 1);
  ::setenv("TRANSMUTE_THREADS", "junk", 1);
  CHECK(thread_count() >= 1);
  ::unsetenv("TRANSMUTE_THREADS");
}

TEST_CASE("worker exceptions reach the caller") {
  CHECK_THROWS_AS(parallel_for(64, [](std::size_t i) {
                    if (i == 37) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
