#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <random>

#include "mploc/errors.hpp"
#include "mploc/model.hpp"
#include "mploc/spectral.hpp"

using namespace mploc;

namespace {

// Matrix built straight from the definition: 2dn + sum V + hU on the
// diagonal, -1 between l1 neighbours.
Eigen::MatrixXd oracle_matrix(const MultiParticleCube& cube, const DisorderRealization& v,
                              const InteractionSpec& in) {
  const auto sites = cube.sites();
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Config& x = sites[static_cast<std::size_t>(i)];
    double diag = 2.0 * x.d() * x.n();
    for (int j = 0; j < x.n(); ++j) diag += v.at(x.particle(j));
    double u = 0.0;
    for (int a = 0; a < x.n(); ++a)
      for (int b = a + 1; b < x.n(); ++b) {
        const int r = point_distance(x.particle(a), x.particle(b));
        if (r <= in.r0) u += in.phi[static_cast<std::size_t>(r)];
      }
    H(i, i) = diag + in.h * u;
    for (Eigen::Index k = 0; k < n; ++k)
      if (l1_distance(x, sites[static_cast<std::size_t>(k)]) == 1) H(i, k) = -1.0;
  }
  return H;
}

DisorderSpec uniform(double M, std::uint64_t seed = 1) {
  DisorderSpec s;
  s.family = DisorderFamily::uniform;
  s.support_bound = M;
  s.master_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("3x3 Laplacian with zero potential") {
  DisorderSpec s = uniform(0.0);
  s.family = DisorderFamily::constant;
  const MultiParticleCube cube(Config(2, {0, 0}), 1);
  const auto H = assemble(cube, DisorderRealization::sample(s, box_for(cube), 0), InteractionSpec{});
  REQUIRE(H.matrix.rows() == 9);
  for (int i = 0; i < 9; ++i) CHECK(H.matrix(i, i) == doctest::Approx(4.0));
  CHECK(H.matrix(0, 1) == -1.0);
  CHECK(H.matrix(0, 3) == -1.0);
  CHECK(H.matrix(0, 4) == 0.0);
  CHECK(H.matrix.isApprox(H.matrix.transpose()));
  // Row sums: 4 - degree.
  const Eigen::VectorXd rows = H.matrix.rowwise().sum();
  CHECK(rows(4) == doctest::Approx(0.0));
  CHECK(rows(0) == doctest::Approx(2.0));
  CHECK(rows(1) == doctest::Approx(1.0));
}

TEST_CASE("diagonal offset 2dn") {
  DisorderSpec s = uniform(0.0);
  s.family = DisorderFamily::constant;
  const MultiParticleCube cube(Config(1, {0, 10, 20}), 0);
  const auto H = assemble(cube, DisorderRealization::sample(s, box_for(cube), 0), InteractionSpec{});
  REQUIRE(H.matrix.rows() == 1);
  CHECK(H.matrix(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("assembly matches the definition") {
  std::mt19937 rng(3);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 3;
    const int d = 1 + (t / 3) % 2;
    const int L = n * d > 3 ? 1 : 2;
    std::vector<int> c(static_cast<std::size_t>(n * d));
    for (auto& v : c) v = static_cast<int>(rng() % 7) - 3;
    const MultiParticleCube cube(Config(d, c), L);
    InteractionSpec in;
    in.phi = {2.0, 0.5, 0.25};
    in.r0 = 2;
    in.h = 0.3;
    const auto real = DisorderRealization::sample(uniform(5.0, 9), box_for(cube), t);
    const auto H = assemble(cube, real, in);
    CHECK((H.matrix - oracle_matrix(cube, real, in)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(H.matrix == H.matrix.transpose());
    // Interior sites couple to all 2nd neighbours, boundary sites to fewer.
    for (std::size_t i = 0; i < cube.size(); ++i) {
      const Config x = cube.site(i);
      int couplings = 0;
      for (Eigen::Index k = 0; k < H.matrix.cols(); ++k) {
        const double v = H.matrix(static_cast<Eigen::Index>(i), k);
        if (k != static_cast<Eigen::Index>(i)) {
          CHECK((v == 0.0 || v == -1.0));
          couplings += v == -1.0;
        }
      }
      const bool interior = sup_distance(x, cube.center()) < L;
      if (interior) CHECK(couplings == 2 * n * d);
      else CHECK(couplings < 2 * n * d);
    }
  }
}

TEST_CASE("zero interaction gives a Kronecker sum of one-particle operators") {
  const MultiParticleCube cube(Config(1, {0, 1}), 2);
  const auto real = DisorderRealization::sample(uniform(5.0, 4), box_for(cube), 0);
  const auto H2 = assemble(cube, real, InteractionSpec{});
  const auto H1 = assemble(MultiParticleCube(Config(1, {0}), 2), real, InteractionSpec{});
  const auto H1b = assemble(MultiParticleCube(Config(1, {1}), 2), real, InteractionSpec{});
  const Eigen::Index a = H1.matrix.rows(), b = H1b.matrix.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(a * b, a * b);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < a; ++j)
      for (Eigen::Index k = 0; k < b; ++k) {
        K(i * b + k, j * b + k) += H1.matrix(i, j);
        if (i == j)
          for (Eigen::Index l = 0; l < b; ++l) K(i * b + k, i * b + l) += H1b.matrix(k, l);
      }
  CHECK((H2.matrix - K).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("uniform disorder support and mean") {
  const SiteBox box{{0}, {99999}};
  const auto real = DisorderRealization::sample(uniform(1.0, 77), box, 0);
  double sum = 0.0, lo = 1e9, hi = -1e9;
  for (double v : real.values()) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= -1.0);
  CHECK(hi <= 1.0);
  CHECK(std::abs(sum / 1e5) < 0.01);
  const auto again = DisorderRealization::sample(uniform(1.0, 77), box, 0);
  CHECK(std::equal(again.values().begin(), again.values().end(), real.values().begin()));
}

TEST_CASE("laws stay on their supports") {
  for (auto family : {DisorderFamily::truncated_gaussian, DisorderFamily::piecewise_density}) {
    DisorderSpec s = uniform(3.0, 5);
    s.family = family;
    const auto real = DisorderRealization::sample(s, SiteBox{{0}, {9999}}, 0);
    for (double v : real.values()) {
      CHECK(v >= -3.0);
      CHECK(v <= 3.0);
    }
    CHECK(s.cdf(-3.0) == doctest::Approx(0.0));
    CHECK(s.cdf(3.0) == doctest::Approx(1.0));
    for (double u : {0.1, 0.5, 0.9}) CHECK(s.cdf(s.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("coupled realizations agree on shared sites") {
  const auto spec = uniform(5.0, 12);
  const auto small = DisorderRealization::sample(spec, SiteBox{{-3}, {3}}, 4);
  const auto big = DisorderRealization::sample(spec, SiteBox{{-10}, {10}}, 4);
  const auto other = DisorderRealization::sample(spec, SiteBox{{-3}, {3}}, 5);
  bool differs = false;
  for (int x = -3; x <= 3; ++x) {
    const std::vector<int> p{x};
    CHECK(small.at(p) == big.at(p));
    differs = differs || small.at(p) != other.at(p);
  }
  CHECK(differs);
  CHECK_THROWS_AS(small.at(std::vector<int>{4}), CoverageError);
}

TEST_CASE("continuity modulus") {
  CHECK(continuity_modulus(uniform(1.0), 0.2) == doctest::Approx(0.1));
  CHECK(continuity_modulus(uniform(1.0), 2.0) == doctest::Approx(1.0));
  CHECK(continuity_modulus(uniform(5.0), 1.0) == doctest::Approx(0.1));
  CHECK(continuity_modulus(uniform(5.0), 10.0) == doctest::Approx(1.0));
  CHECK(continuity_modulus(uniform(5.0), 25.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(continuity_modulus(uniform(5.0), 0.0), ParameterError);
}

TEST_CASE("piecewise continuity modulus against sampled window mass") {
  DisorderSpec s = uniform(2.0, 31);
  s.family = DisorderFamily::piecewise_density;
  s.piecewise.edges = {-2.0, -0.5, 0.5, 2.0};
  s.piecewise.weights = {1.0, 4.0, 1.0};
  const double eps = 0.4;
  const auto real = DisorderRealization::sample(s, SiteBox{{0}, {199999}}, 0);
  double best = 0.0;
  for (double a = -2.0; a <= 2.0 - eps; a += 0.01) {
    std::size_t hits = 0;
    for (double v : real.values()) hits += v >= a && v <= a + eps;
    best = std::max(best, static_cast<double>(hits) / 2e5);
  }
  CHECK(continuity_modulus(s, eps) == doctest::Approx(best).epsilon(0.02));
}

TEST_CASE("disorder spec validation") {
  CHECK_THROWS_AS(uniform(-1.0).validate(), ParameterError);
  DisorderSpec s = uniform(1.0);
  s.density_weight_exponent = 1.0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  CHECK_THROWS_AS(disorder_family_from_string("cauchy"), ParameterError);
}

TEST_CASE("interaction energy") {
  InteractionSpec in;
  in.phi = {3.0, 1.0};
  in.r0 = 1;
  CHECK(interaction_energy(Config(1, {0, 0}), in) == 3.0);
  CHECK(interaction_energy(Config(1, {0, 1}), in) == 1.0);
  CHECK(interaction_energy(Config(1, {0, 2}), in) == 0.0);
  CHECK(interaction_energy(Config(1, {0, 1, 0}), in) == 5.0);
  CHECK(interaction_energy(Config(1, {7}), in) == 0.0);
  CHECK(interaction_norm(MultiParticleCube(Config(1, {0, 0}), 1), in) == 3.0);
  InteractionSpec wide;
  wide.phi = {1.0, 1.0, 1.0};
  wide.r0 = 2;
  CHECK(interaction_energy(Config(1, {0, 1}), wide) == 1.0);

  std::mt19937 rng(17);
  std::uniform_int_distribution<int> coord(-3, 3);
  for (int t = 0; t < 100; ++t) {
    const Config x(2, {coord(rng), coord(rng), coord(rng), coord(rng), coord(rng), coord(rng)});
    double expected = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        const int r = point_distance(x.particle(a), x.particle(b));
        if (r <= wide.r0) expected += wide.phi[static_cast<std::size_t>(r)];
      }
    CHECK(interaction_energy(x, wide) == expected);
  }
  InteractionSpec bad;
  bad.phi = {1.0};
  bad.r0 = 1;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("spectrum interval contains every realization") {
  const Interval I = spectrum_interval(2, 1, 1.0, 0.0, 0.0);
  CHECK(I.lo == doctest::Approx(-11.0));
  CHECK(I.hi == doctest::Approx(11.0));
  const Interval K = spectrum_interval(2, 1, 1.0, 0.5, 2.0);
  CHECK(K.lo == doctest::Approx(-12.0));
  CHECK(K.hi == doctest::Approx(12.0));
  InteractionSpec in;
  in.h = 0.5;
  const MultiParticleCube cube(Config(1, {0, 1}), 2);
  const Interval J = spectrum_interval(2, 1, 5.0, in.h, interaction_norm(cube, in));
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto H = assemble(cube, DisorderRealization::sample(uniform(5.0, 8), box_for(cube), t), in);
    const auto ev = diagonalize(H).eigenvalues;
    CHECK(ev.minCoeff() >= J.lo);
    CHECK(ev.maxCoeff() <= J.hi);
  }
}

TEST_CASE("site cap") {
  CHECK(site_cap() >= 1);
  const MultiParticleCube huge(Config(1, {0, 0, 0}), 20);  // 41^3 sites
  CHECK_THROWS_AS(check_site_cap(huge), ResourceError);
}

TEST_CASE("bandwidth") {
  DisorderSpec s = uniform(1.0);
  const MultiParticleCube cube(Config(1, {0, 0}), 2);
  const auto H = assemble(cube, DisorderRealization::sample(s, box_for(cube), 0), InteractionSpec{});
  CHECK(H.bandwidth() == 5);
}
