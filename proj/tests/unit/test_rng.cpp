#include "doctest.h"

#include "wdru/rng.hpp"

#include <algorithm>
#include <set>

using namespace wdru;

TEST_CASE("stream matches the SplitMix64 reference outputs") {
  CounterRng zero(0);
  CHECK(zero.next() == 0xe220a8397b1dcdafULL);
  CHECK(zero.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(zero.next() == 0x06c45d188009454fULL);
  CounterRng r42(42);
  CHECK(r42.next() == 0xbdd732262feb6e95ULL);
  CHECK(r42.counter() == 1);
}

TEST_CASE("derived draws follow the documented recipes") {
  CounterRng a(42);
  CHECK(a.uniform() == doctest::Approx(0.7415648787718233).epsilon(1e-15));
  CounterRng b(42);
  CHECK(b.index(10) == 7);
  CHECK(derive_seed(5, 3) == 0x9785a5dd25c27de2ULL);
}

TEST_CASE("uniform and index stay in range") {
  CounterRng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.index(7) < 7);
  }
}

TEST_CASE("normal draws have roughly unit moments") {
  CounterRng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01).scale(1.0));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sampling without replacement gives distinct indices") {
  CounterRng rng(11);
  const auto idx = sample_without_replacement(50, 20, rng);
  CHECK(idx.size() == 20);
  CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 20);
  CHECK(*std::max_element(idx.begin(), idx.end()) < 50);
  CounterRng again(11);
  CHECK(sample_without_replacement(50, 20, again) == idx);
  CHECK_THROWS(sample_without_replacement(3, 4, rng));
  CHECK(sample_without_replacement(4, 4, rng).size() == 4);
}

TEST_CASE("derived seeds separate trials") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 1000; ++t) seeds.insert(derive_seed(17, t));
  CHECK(seeds.size() == 1000);
  CHECK(derive_seed(17, 3) == derive_seed(17, 3));
}
