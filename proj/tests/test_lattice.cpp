#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "bandlab/lattice.hpp"
#include "bandlab/rng.hpp"

using namespace bandlab;

// Brute-force count of lattice points with 1 <= |x| <= W by scanning the
// enclosing cube, independent of the shell enumeration order.
static int brute_shell_count(int d, int W) {
  int count = 0;
  std::vector<int> c(d, -W);
  while (true) {
    long long r2 = 0;
    for (int i = 0; i < d; ++i) r2 += static_cast<long long>(c[i]) * c[i];
    if (r2 >= 1 && r2 <= static_cast<long long>(W) * W) ++count;
    int i = 0;
    for (; i < d; ++i) {
      if (++c[i] <= W) break;
      c[i] = -W;
    }
    if (i == d) break;
  }
  return count;
}

TEST_CASE("periodic distance wraps the torus") {
  LatticeConfig cfg(1, 10, 2);
  CHECK(cfg.periodic_distance({4}, {-5}) == doctest::Approx(1.0));
  CHECK(cfg.periodic_distance({3}, {3}) == 0.0);

  LatticeConfig cfg2(2, 20, 3);
  CHECK(cfg2.periodic_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
}

TEST_CASE("band shell counts match brute force") {
  // d=1, W=3: {+-1, +-2, +-3}
  LatticeConfig cfg(1, 11, 3);
  CHECK(cfg.shell_size() == 6);
  std::set<int> offsets;
  for (const auto& s : cfg.band_shell()) offsets.insert(s[0]);
  CHECK(offsets == std::set<int>{-3, -2, -1, 1, 2, 3});

  // d=2, W=3 Euclidean: 28 points
  LatticeConfig cfg2(2, 9, 3);
  CHECK(cfg2.shell_size() == 28);

  LatticeConfig cfg3(1, 5, 1);
  CHECK(cfg3.shell_size() == 2);

  for (int d = 1; d <= 3; ++d)
    for (int W = 1; W <= (d == 3 ? 4 : 6); ++W)
      CHECK(shell_point_count(d, W) == brute_shell_count(d, W));
}

TEST_CASE("shell is closed under negation") {
  for (int d = 1; d <= 2; ++d) {
    LatticeConfig cfg(d, 21, 4);
    std::set<Site> shell(cfg.band_shell().begin(), cfg.band_shell().end());
    for (const auto& u : cfg.band_shell()) CHECK(shell.count(cfg.negate(u)) == 1);
  }
}

TEST_CASE("site index round trips") {
  for (int N : {4, 5}) {
    LatticeConfig cfg(2, N, 1);
    for (std::int64_t i = 0; i < cfg.volume(); ++i) {
      Site s = cfg.site_of_index(i);
      CHECK(cfg.site_index(s) == i);
      for (int c : s) {
        CHECK(c >= -(N / 2));
        CHECK(c <= N - 1 - N / 2);
      }
    }
  }
  // smallest canonical site maps to 0
  LatticeConfig cfg(2, 4, 1);
  CHECK(cfg.site_index({-2, -2}) == 0);
  // 1d: index = coord + [N/2]
  LatticeConfig cfg1(1, 9, 2);
  for (int c = -4; c <= 4; ++c) CHECK(cfg1.site_index({c}) == c + 4);
}

TEST_CASE("periodic distance is a metric on random triples") {
  LatticeConfig cfg(2, 12, 3);
  auto random_site = [&](std::uint64_t ctr) {
    Site s(2);
    s[0] = cfg.canonical_coord(static_cast<long long>(counter_rng(7, 0, ctr) % 12));
    s[1] = cfg.canonical_coord(static_cast<long long>(counter_rng(7, 1, ctr) % 12));
    return s;
  };
  for (std::uint64_t k = 0; k < 200; ++k) {
    Site a = random_site(3 * k), b = random_site(3 * k + 1), c = random_site(3 * k + 2);
    double ab = cfg.periodic_distance(a, b);
    double ba = cfg.periodic_distance(b, a);
    CHECK(ab == doctest::Approx(ba));
    CHECK((ab == 0.0) == (a == b));
    CHECK(ab <= cfg.periodic_distance(a, c) + cfg.periodic_distance(c, b) + 1e-12);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS(LatticeConfig(0, 10, 2));
  CHECK_THROWS(LatticeConfig(1, 2, 1));
  CHECK_THROWS(LatticeConfig(1, 10, 5));  // W < N/2 violated
  CHECK_THROWS(LatticeConfig(1, 10, 0));
  CHECK_NOTHROW(LatticeConfig(1, 10, 4));
}
