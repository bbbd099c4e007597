#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mploc/errors.hpp"
#include "mploc/lattice.hpp"
#include "mploc/model.hpp"

using namespace mploc;

namespace {

Config c1(std::vector<int> coords) { return Config(1, std::move(coords)); }

int brute_sup(const Config& a, const Config& b) {
  int best = 0;
  for (int k = 0; k < a.dim(); ++k) best = std::max(best, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
  return best;
}

// Explicit set of single-particle sites of C_L(point), d = 1.
std::set<int> interval_sites(int center, int L) {
  std::set<int> s;
  for (int v = center - L; v <= center + L; ++v) s.insert(v);
  return s;
}

// J-separability by direct union/intersection of site sets (d = 1).
bool set_separable(const Config& x, const Config& y, int L, const std::vector<int>& J) {
  std::set<int> inside, other;
  for (int i = 0; i < x.n(); ++i) {
    const auto s = interval_sites(x[static_cast<std::size_t>(i)], L);
    const bool in_J = std::find(J.begin(), J.end(), i) != J.end();
    (in_J ? inside : other).insert(s.begin(), s.end());
  }
  for (int i = 0; i < y.n(); ++i) {
    const auto s = interval_sites(y[static_cast<std::size_t>(i)], L);
    other.insert(s.begin(), s.end());
  }
  for (int v : inside)
    if (other.count(v)) return false;
  return true;
}

std::vector<std::vector<int>> nonempty_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> J;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) J.push_back(i);
    out.push_back(J);
  }
  return out;
}

}  // namespace

TEST_CASE("config validation and accessors") {
  CHECK_THROWS_AS(Config(0, {1}), DimensionError);
  CHECK_THROWS_AS(Config(2, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Config(1, {}), DimensionError);
  const Config x(2, {1, 2, 3, 4});
  CHECK(x.n() == 2);
  CHECK(x.d() == 2);
  CHECK(x.particle(1)[0] == 3);
  const std::vector<int> pick{1};
  CHECK(x.select(pick) == Config(2, {3, 4}));
  CHECK(Config(2, {1, 2}).join(Config(2, {3, 4})) == x);
}

TEST_CASE("sup distance") {
  CHECK(sup_distance(c1({0, 0}), c1({0, 0})) == 0);
  CHECK(sup_distance(c1({0, 0}), c1({3, -5})) == 5);
  CHECK_THROWS_AS(sup_distance(c1({0, 0}), c1({0})), DimensionError);
  CHECK_THROWS_AS(sup_distance(Config(1, {0, 0}), Config(2, {0, 0})), DimensionError);

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(-20, 20);
  for (int t = 0; t < 200; ++t) {
    std::vector<int> a(6), b(6);
    for (auto& v : a) v = coord(rng);
    for (auto& v : b) v = coord(rng);
    const Config x(2, a), y(2, b);
    CHECK(sup_distance(x, y) == brute_sup(x, y));
  }
}

TEST_CASE("cube cardinality and enumeration") {
  for (int n = 1; n <= 3; ++n) {
    for (int L = 0; L <= 2; ++L) {
      const MultiParticleCube cube(Config::zeros(n, 1), L);
      std::size_t expected = 1;
      for (int k = 0; k < n; ++k) expected *= static_cast<std::size_t>(2 * L + 1);
      CHECK(cube.size() == expected);
      for (std::size_t i = 0; i < cube.size(); ++i) CHECK(*cube.index_of(cube.site(i)) == i);
    }
  }
  const MultiParticleCube cube(c1({0, 0}), 1);
  CHECK(cube.site(0) == c1({-1, -1}));
  CHECK(cube.site(1) == c1({-1, 0}));
  CHECK(!cube.index_of(c1({2, 0})));
  CHECK_THROWS_AS(MultiParticleCube(c1({0}), -1), ParameterError);
  const MultiParticleCube rect(c1({0, 5}), std::vector<int>{1, 2});
  CHECK(rect.size() == 15);
  CHECK_FALSE(rect.equal_sides());
  CHECK_THROWS_AS(rect.side(), ParameterError);
}

TEST_CASE("boundaries") {
  SUBCASE("one-dimensional interval") {
    const auto b = boundaries(MultiParticleCube(c1({0}), 2));
    CHECK(b.internal == std::vector<Config>{c1({-2}), c1({2})});
    CHECK(b.external == std::vector<Config>{c1({-3}), c1({3})});
  }
  SUBCASE("3x3 grid keeps every site but the center") {
    const MultiParticleCube cube(c1({0, 0}), 1);
    const auto b = boundaries(cube);
    CHECK(b.internal.size() == 8);
    for (const auto& v : b.internal) CHECK(v != c1({0, 0}));
  }
  SUBCASE("partition and disjointness") {
    for (int n = 1; n <= 2; ++n) {
      for (int L = 1; L <= 3; ++L) {
        const MultiParticleCube cube(Config::zeros(n, 2), L);
        const auto b = boundaries(cube);
        std::size_t interior = 0;
        for (const auto& x : cube.sites()) interior += sup_distance(x, cube.center()) < L;
        CHECK(b.internal.size() + interior == cube.size());
        for (const auto& v : b.internal) CHECK(cube.contains(v));
        for (const auto& v : b.external) {
          CHECK_FALSE(cube.contains(v));
          int dist = 0;
          for (int k = 0; k < v.dim(); ++k) {
            const int c = v[static_cast<std::size_t>(k)];
            dist = std::max(dist, std::max(cube.lower(k) - c, c - cube.upper(k)));
          }
          CHECK(dist == 1);
        }
        std::size_t shell = 1;
        for (int k = 0; k < n * 2; ++k) shell *= static_cast<std::size_t>(2 * L + 3);
        CHECK(b.external.size() == shell - cube.size());
      }
    }
  }
  CHECK(internal_boundary_indices(MultiParticleCube(c1({0}), 2)) == std::vector<std::size_t>{0, 4});
}

TEST_CASE("kappa and separability collection") {
  CHECK(kappa(1) == 1);
  CHECK(kappa(2) == 4);
  CHECK(kappa(3) == 27);
  CHECK(separability_collection(c1({5}), 2).size() == 1);
  const auto centers = separability_collection(c1({3, 8}), 2);
  REQUIRE(centers.size() == 4);
  CHECK(centers[0] == c1({3, 3}));
  CHECK(centers[1] == c1({3, 8}));
  CHECK(centers[2] == c1({8, 3}));
  CHECK(centers[3] == c1({8, 8}));
  CHECK_THROWS_AS(separability_collection(c1({0}), 1), ParameterError);
}

TEST_CASE("pair separability") {
  const auto v = is_separable(c1({0}), c1({20}), 2, 1);
  CHECK(v.separable);
  CHECK(v.distance_ok);
  REQUIRE(v.witness_J);
  CHECK(*v.witness_J == std::vector<int>{0});
  CHECK_FALSE(is_separable(c1({4, 9}), c1({4, 9}), 2, 2).separable);
  CHECK_FALSE(is_separable(c1({0}), c1({14}), 2, 1).separable);  // 14 is not > 7NL
}

TEST_CASE("separability verdict agrees with explicit set arithmetic") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coord(-40, 40);
  std::uniform_int_distribution<int> side(1, 3);
  for (int t = 0; t < 400; ++t) {
    const Config x = c1({coord(rng), coord(rng)});
    const Config y = c1({coord(rng), coord(rng)});
    const int L = side(rng);
    std::optional<std::vector<int>> expected;
    for (const auto& J : nonempty_subsets(2))
      if (!expected && set_separable(x, y, L, J)) expected = J;
    CHECK(separating_subset(x, y, L) == expected);

    const auto verdict = is_separable(x, y, L, 2);
    const bool distance = sup_distance(x, y) > 7 * 2 * L;
    bool either = expected.has_value();
    for (const auto& J : nonempty_subsets(2)) either = either || set_separable(y, x, L, J);
    CHECK(verdict.distance_ok == distance);
    CHECK(verdict.separable == (distance && either));
    if (verdict.separable) {
      REQUIRE(verdict.witness_J);
      CHECK_FALSE(verdict.witness_J->empty());
      const Config& a = verdict.first_is_separated ? x : y;
      const Config& b = verdict.first_is_separated ? y : x;
      CHECK(set_separable(a, b, L, *verdict.witness_J));
    }
    // Symmetric once both orderings meet the distance clause.
    CHECK(is_separable(y, x, L, 2).separable == verdict.separable);
  }
}

TEST_CASE("distant cubes are separable outside the collection (window scan)") {
  const int N = 2, L = 2, radius = 60;
  for (int L_case : {2, 3}) {
    std::size_t failures = 0;
    for (int x2 = -10; x2 <= 10; x2 += 5) {
      const Config x = c1({0, x2});
      const auto centers = separability_collection(x, L_case);
      for (int a = -radius; a <= radius; ++a) {
        for (int b = x2 - radius; b <= x2 + radius; ++b) {
          const Config y = c1({a, b});
          if (sup_distance(x, y) <= 7 * N * L_case) continue;
          bool covered = false;
          for (const auto& c : centers) covered = covered || sup_distance(y, c) <= 2 * 2 * L_case;
          if (!covered && !is_separable(x, y, L_case, N).separable) ++failures;
        }
      }
    }
    CHECK(failures == 0);
  }
  (void)L;
}

TEST_CASE("far cubes are J-separable (window scan)") {
  for (int L : {2, 3}) {
    std::size_t failures = 0;
    for (int y2 = -12; y2 <= 12; y2 += 4) {
      const Config y = c1({0, y2});
      const int spread = std::abs(y2);
      for (int a = -60; a <= 60; ++a) {
        for (int b = -60; b <= 60; ++b) {
          const Config x = c1({a, b});
          if (sup_distance(x, y) <= spread + 5 * 2 * L) continue;
          if (!separating_subset(x, y, L)) ++failures;
        }
      }
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("interactivity classification") {
  const std::vector<int> first{0}, second{1};
  auto pi = classify_interactivity(MultiParticleCube(c1({0, 100}), 2), 1);
  CHECK(pi.kind == Interactivity::partially);
  CHECK(pi.first == first);
  CHECK(pi.second == second);
  CHECK(classify_interactivity(MultiParticleCube(c1({0, 1}), 2), 1).kind == Interactivity::fully);
  // Boundary case: gap 2L + r0 + 2 - 2L = r0 + 2 versus r0.
  CHECK(classify_interactivity(MultiParticleCube(c1({0, 2 * 2 + 1 + 2}), 2), 1).kind == Interactivity::partially);
  CHECK(classify_interactivity(MultiParticleCube(c1({0, 2 * 2 + 1}), 2), 1).kind == Interactivity::fully);
  CHECK_THROWS_AS(classify_interactivity(MultiParticleCube(c1({0}), 2), 1), ClassificationError);

  SUBCASE("largest gap wins, particle 0 grouped first") {
    // Particles at 0, 1 and 50: the split {0,1} | {2} has the largest gap.
    const auto c = classify_interactivity(MultiParticleCube(c1({0, 1, 50}), 2), 1);
    CHECK(c.kind == Interactivity::partially);
    CHECK(c.first == std::vector<int>{0, 1});
    CHECK(c.second == std::vector<int>{2});
    CHECK(c.gap == 45);
    const auto d = classify_interactivity(MultiParticleCube(c1({50, 0, 1}), 2), 1);
    CHECK(d.first == std::vector<int>{0});
    CHECK(d.second == std::vector<int>{1, 2});
  }
}

TEST_CASE("interaction is additive across a partially interactive split") {
  InteractionSpec in;
  in.phi = {2.0, 1.0, 0.5};
  in.r0 = 2;
  for (const auto& center : {c1({0, 12}), c1({0, 40, 3}), c1({-20, 0, 25})}) {
    const MultiParticleCube cube(center, 2);
    const auto split = classify_interactivity(cube, in.r0);
    REQUIRE(split.kind == Interactivity::partially);
    for (const auto& x : cube.sites())
      CHECK(interaction_energy(x, in) ==
            interaction_energy(x.select(split.first), in) + interaction_energy(x.select(split.second), in));
  }
}
