#include "doctest.h"
#include "poisonlab/rng.hpp"

#include <set>
#include <vector>

using namespace poisonlab;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("child streams depend on tags, not on consumption") {
  Rng parent(7);
  Rng c1 = parent.child({1, 2});
  parent.next_u64();
  parent.next_u64();
  Rng c2 = parent.child({1, 2});
  for (int i = 0; i < 16; ++i) CHECK(c1.next_u64() == c2.next_u64());

  Rng other = parent.child({1, 3});
  Rng base = parent.child({1, 2});
  CHECK(other.next_u64() != base.next_u64());
}

TEST_CASE("uniform_index stays in range and covers all values") {
  Rng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_index(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("uniform_real in [0,1), normal finite") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform_real();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(std::isfinite(rng.normal()));
  }
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(20), b(20);
  for (int i = 0; i < 20; ++i) a[i] = b[i] = i;
  Rng r1(3), r2(3);
  r1.shuffle(a);
  r2.shuffle(b);
  CHECK(a == b);
  std::sort(b.begin(), b.end());
  for (int i = 0; i < 20; ++i) CHECK(b[i] == i);
}
