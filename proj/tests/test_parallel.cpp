#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cstdint>
#include <numeric>
#include <vector>

#include "deeprotect/errors.hpp"
#include "deeprotect/parallel.hpp"
#include "doctest.h"

using namespace deeprotect;

TEST_CASE("for_each_index visits every index exactly once") {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    const std::int64_t n = 10000;
    std::vector<std::atomic<int>> hits(static_cast<size_t>(n));
    for (auto& h : hits) h.store(0);
    for_each_index(n, exec, [&](std::int64_t i) {
      hits[static_cast<size_t>(i)].fetch_add(1);
    });
    for (std::int64_t i = 0; i < n; ++i) {
      REQUIRE(hits[static_cast<size_t>(i)].load() == 1);
    }
  }
}

TEST_CASE("for_each_index: n = 0 runs nothing") {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    int calls = 0;
    for_each_index(0, exec, [&](std::int64_t) { ++calls; });
    CHECK(calls == 0);
  }
}

TEST_CASE("for_each_index rethrows exceptions with type and payload intact") {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    bool caught = false;
    try {
      for_each_index(100, exec, [&](std::int64_t i) {
        if (i == 57) {
          throw ValidationError("loop-test", "index 57 objects");
        }
      });
    } catch (const ValidationError& e) {
      caught = true;
      CHECK(std::string(e.what()) == "ERROR loop-test: index 57 objects");
    }
    CHECK(caught);
  }
}

TEST_CASE("for_each_index: non-library exceptions also propagate") {
  bool caught = false;
  try {
    for_each_index(8, Exec::kParallel, [&](std::int64_t i) {
      if (i == 3) throw std::out_of_range("boom");
    });
  } catch (const std::out_of_range&) {
    caught = true;
  }
  CHECK(caught);
}

TEST_CASE("for_chunks partitions [0, n) exactly") {
  struct Case {
    std::int64_t n;
    int chunks;
  };
  for (Case c : {Case{100, 7}, Case{5, 8}, Case{1, 1}, Case{0, 4}, Case{64, 64}}) {
    for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
      std::vector<std::pair<std::int64_t, std::int64_t>> ranges(
          static_cast<size_t>(c.chunks));
      for_chunks(c.n, c.chunks, exec,
                 [&](int chunk, std::int64_t begin, std::int64_t end) {
                   ranges[static_cast<size_t>(chunk)] = {begin, end};
                 });
      std::int64_t cursor = 0;
      for (int k = 0; k < c.chunks; ++k) {
        CHECK(ranges[static_cast<size_t>(k)].first == cursor);   // contiguous
        CHECK(ranges[static_cast<size_t>(k)].second >= cursor);  // non-negative
        cursor = ranges[static_cast<size_t>(k)].second;
      }
      CHECK(cursor == c.n);  // full coverage, no overlap
    }
  }
}

TEST_CASE("for_chunks: chunk-ordered reduction is exec-invariant") {
  const std::int64_t n = 100001;
  const int n_chunks = 64;
  std::vector<double> values(static_cast<size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    values[static_cast<size_t>(i)] = 1.0 / static_cast<double>(i + 1);
  }
  auto reduce = [&](Exec exec) {
    std::vector<double> partial(n_chunks, 0.0);
    for_chunks(n, n_chunks, exec,
               [&](int chunk, std::int64_t begin, std::int64_t end) {
                 double s = 0.0;
                 for (std::int64_t i = begin; i < end; ++i) {
                   s += values[static_cast<size_t>(i)];
                 }
                 partial[static_cast<size_t>(chunk)] = s;
               });
    double total = 0.0;
    for (double p : partial) total += p;  // fixed chunk order
    return total;
  };
  CHECK(reduce(Exec::kSerial) == reduce(Exec::kParallel));  // bitwise
}

TEST_CASE("for_chunks rethrows exceptions from inside a chunk") {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    bool caught = false;
    try {
      for_chunks(50, 8, exec, [&](int chunk, std::int64_t, std::int64_t) {
        if (chunk == 5) throw RuntimeError("chunk-test", "chunk 5 failed");
      });
    } catch (const RuntimeError& e) {
      caught = true;
      CHECK(std::string(e.what()) == "ERROR chunk-test: chunk 5 failed");
    }
    CHECK(caught);
  }
}

TEST_CASE("thread introspection is sane") {
  CHECK(hardware_threads() >= 1);
  if (!openmp_enabled()) {
    CHECK(hardware_threads() == 1);
  }
}
