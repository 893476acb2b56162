#include <algorithm>
#include <cstdint>

#include "doctest.h"
#include "rng.hpp"

using namespace horocover;

TEST_SUITE("rng") {
  // Frozen from tests/oracles/rng_golden.py.
  TEST_CASE("golden output for seed 0, stream 0") {
    RandomStream r(0, 0);
    CHECK(r.next_u64() == UINT64_C(9826868804458059804));
  }

  TEST_CASE("same key, same stream") {
    RandomStream a(99, stream_id(StreamPurpose::SigmaSamples, 5));
    RandomStream b(99, stream_id(StreamPurpose::SigmaSamples, 5));
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  }

  TEST_CASE("different ids and seeds give different streams") {
    struct Key {
      std::uint64_t s1, i1, s2, i2;
    };
    const Key keys[] = {{1, 0, 1, 1},
                        {1, 0, 2, 0},
                        {0, stream_id(StreamPurpose::CltSamples, 0), 0, stream_id(StreamPurpose::CltJitter, 0)},
                        {7, 1, 7, std::uint64_t{1} << 32}};
    for (const auto& [s1, i1, s2, i2] : keys) {
      RandomStream a(s1, i1), b(s2, i2);
      int differing = 0;
      for (int i = 0; i < 100; ++i) differing += a.next_u64() != b.next_u64() ? 1 : 0;
      CHECK(differing >= 95);
    }
  }

  TEST_CASE("uniform stays in [0, 1)") {
    RandomStream r(3, 3);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = r.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("stream ids do not collide across purposes") {
    CHECK(stream_id(StreamPurpose::SigmaSamples, 0) != stream_id(StreamPurpose::CltSamples, 0));
    CHECK(stream_id(StreamPurpose::UlamCells, 12) == ((std::uint64_t{5} << 48) | 12));
  }
}
