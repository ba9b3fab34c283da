#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "coversim/rng.hpp"

using namespace coversim;

TEST_CASE("identical seeds give identical sequences") {
  Rng a = Rng::stream(42, "test");
  Rng b = Rng::stream(42, "test");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams with different labels or indices are distinct") {
  Rng a = Rng::stream(42, "alpha");
  Rng b = Rng::stream(42, "beta");
  Rng c = Rng::stream(42, "alpha", 1);
  CHECK(a.next_u64() != b.next_u64());
  CHECK(Rng::stream(42, "alpha").next_u64() != c.next_u64());
}

TEST_CASE("uniform01 stays in [0,1)") {
  Rng r = Rng::stream(7, "u01");
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_int respects the bound and hits all values") {
  Rng r = Rng::stream(7, "ints");
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = r.uniform_int(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("poisson mean is close to lambda") {
  Rng r = Rng::stream(11, "poisson");
  const double lambda = 138.9;
  double sum = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(r.poisson(lambda));
  const double mean = sum / n;
  CHECK(std::abs(mean - lambda) < 3.0 * std::sqrt(lambda / n) + 1.0);
  CHECK(Rng::stream(1, "z").poisson(0.0) == 0);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<int> w = v;
  Rng a = Rng::stream(3, "shuffle");
  Rng b = Rng::stream(3, "shuffle");
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 10);
}
