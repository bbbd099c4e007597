#include <doctest.h>

#include <cmath>
#include <random>

#include "mploc/errors.hpp"
#include "mploc/msa.hpp"

using namespace mploc;

namespace {

DisorderSpec flat_zero() {
  DisorderSpec s;
  s.family = DisorderFamily::constant;
  s.support_bound = 0.0;
  return s;
}

DisorderSpec uniform(double M) {
  DisorderSpec s;
  s.support_bound = M;
  s.master_seed = 2718;
  return s;
}

MsaParams one_particle(double m) {
  MsaParams p;
  p.N = 1;
  p.n = 1;
  p.d = 1;
  p.m = m;
  return p;
}

// Largest pairwise-separated subset by trying every subset.
int exhaustive_packing(const std::vector<Config>& pts, int min_distance) {
  int best = 0;
  const auto n = pts.size();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if ((mask >> i & 1u) && (mask >> j & 1u) && sup_distance(pts[i], pts[j]) <= min_distance) ok = false;
    if (ok) best = std::max(best, __builtin_popcount(mask));
  }
  return best;
}

}  // namespace

TEST_CASE("decay exponent and resonance threshold") {
  CHECK(gamma(0.5, 256, 2, 2) == doctest::Approx(0.75));
  CHECK(gamma(0.5, 256, 1, 2) == doctest::Approx(1.125));
  CHECK(resonance_threshold(100) == doctest::Approx(std::exp(-10.0)));
  CHECK(resonance_threshold(16, 0.25) == doctest::Approx(std::exp(-2.0)));
  double previous = gamma(0.1, 8, 1, 2);
  for (int L = 32; L < 1 << 24; L *= 4) {
    const double g = gamma(0.1, L, 1, 2);
    CHECK(g < previous);
    CHECK(g > 0.1);
    CHECK(g <= 0.1 * std::pow(1.0 + std::pow(8.0, -0.125), 2) + 1e-15);
    previous = g;
  }
}

TEST_CASE("parameter helpers") {
  MsaParams p;
  CHECK(p.J() == 9);
  CHECK(p.scale(0) == 8);
  CHECK(p.scale(1) == 22);
  CHECK(p.scale(2) == 103);
  CHECK(p.p_k(2) == doctest::Approx(2.0 * 1.21));
  p.J_threshold = 3;
  CHECK(p.J() == 3);
  CHECK_FALSE(p.strict_check().strict);
  p.p = 18.0;
  p.m = 0.005;
  CHECK(p.strict_check().strict);
  p.m = 0.01;
  CHECK(p.strict_check().violations.size() == 1);
  p.theta = 0.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("three-site cube verdict against the closed form") {
  // Path of three sites with zero potential: G(0, +-1; E) = 1 / ((2 - E)^2 - 2).
  const MultiParticleCube cube(Config(1, {0}), 1);
  const auto H = assemble(cube, DisorderRealization::sample(flat_zero(), box_for(cube), 0), {});
  const auto spec = diagonalize(H);
  for (double E : {-1.0, 0.3, 1.2, 5.0}) {
    const double a = 2.0 - E;
    const double F = 1.0 / std::abs(a * a - 2.0);
    for (double m : {0.01, 1.0}) {
      const auto params = one_particle(m);
      const double threshold = std::exp(-gamma(m, 1, 1, 1) * 1.0);
      for (const auto& v : {classify_cube(H, E, params), classify_cube(spec, E, params)}) {
        CHECK(v.max_boundary_green == doctest::Approx(F).epsilon(1e-12));
        CHECK(v.gamma_threshold == doctest::Approx(threshold));
        CHECK(v.ns == (F <= threshold));
        const double eta = std::min({std::abs(E - (2 - std::sqrt(2.0))), std::abs(E - 2.0), std::abs(E - 2 - std::sqrt(2.0))});
        CHECK(v.eta == doctest::Approx(eta));
        CHECK(v.resonant == (eta <= std::exp(-1.0)));
      }
    }
  }
  // E = -1, m = 1: F = 1/7 > e^{-2}, singular but not resonant.
  const auto v = classify_cube(H, -1.0, one_particle(1.0));
  CHECK_FALSE(v.ns);
  CHECK_FALSE(v.resonant);
}

TEST_CASE("energy on the spectrum is resonant and singular") {
  const MultiParticleCube cube(Config(1, {0}), 1);
  const auto H = assemble(cube, DisorderRealization::sample(flat_zero(), box_for(cube), 0), {});
  for (const auto& v : {classify_cube(H, 2.0, one_particle(0.01)), classify_cube(diagonalize(H), 2.0, one_particle(0.01))}) {
    CHECK(v.resonant);
    CHECK_FALSE(v.ns);
    CHECK(v.eta <= 1e-12);
  }
}

TEST_CASE("both verdict paths agree on random two-particle cubes") {
  MsaParams p;
  p.m = 0.3;
  InteractionSpec in;
  in.h = 1.0;
  const MultiParticleCube cube(Config(1, {0, 2}), 3);
  int singular = 0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    const auto H = assemble(cube, DisorderRealization::sample(uniform(5.0), box_for(cube), t), in);
    const auto spec = diagonalize(H);
    for (double E : {-3.0, 0.5, 4.0, 9.0}) {
      const auto a = classify_cube(H, E, p);
      const auto b = classify_cube(spec, E, p);
      CHECK(a.ns == b.ns);
      CHECK(a.resonant == b.resonant);
      CHECK(a.max_boundary_green == doctest::Approx(b.max_boundary_green).epsilon(1e-8));
      singular += !a.ns;
    }
  }
  CHECK(singular > 0);
}

TEST_CASE("boundary Green profile matches pointwise maxima") {
  const MultiParticleCube cube(Config(1, {0, 4}), 2);
  const auto spec = diagonalize(assemble(cube, DisorderRealization::sample(uniform(5.0), box_for(cube), 3), {}));
  std::vector<double> energies;
  for (int i = 0; i < 600; ++i) energies.push_back(-6.0 + 0.03 * i);
  energies.push_back(spec.eigenvalues(4));
  const auto profile = boundary_green_profile(spec, energies);
  for (std::size_t i = 0; i + 1 < energies.size(); ++i)
    CHECK(profile[i] == doctest::Approx(boundary_green_max(spec, energies[i])).epsilon(1e-12));
  CHECK(std::isinf(profile.back()));
}

TEST_CASE("complete non-resonance against a direct scan") {
  auto params = one_particle(0.01);
  const MultiParticleCube cube(Config(1, {0}), 8);
  int cnr_count = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto real = DisorderRealization::sample(uniform(5.0), box_for(cube), t);
    const double E = -4.0 + 0.25 * static_cast<double>(t);
    bool expected = true;
    for (int ell = 4; ell <= 8; ++ell)
      for (int c = -8 + ell; c <= 8 - ell; ++c) {
        const auto spec = diagonalize(assemble(MultiParticleCube(Config(1, {c}), ell), real, {}));
        if (spec.distance_to_spectrum(E) <= std::exp(-std::sqrt(static_cast<double>(ell)))) expected = false;
      }
    const auto r = is_cnr(cube, E, params, real, {});
    CHECK(r.cnr == expected);
    CHECK(r.offender.has_value() == !r.cnr);
    // A coarser scan looks at a subset of the cubes.
    if (r.cnr) CHECK(is_cnr(cube, E, params, real, {}, 2).cnr);
    cnr_count += r.cnr;
  }
  CHECK(cnr_count > 0);
  CHECK(cnr_count < 50);

  const auto real = DisorderRealization::sample(uniform(5.0), box_for(cube), 0);
  const double E = diagonalize(assemble(cube, real, {})).eigenvalues(3);
  const auto r = is_cnr(cube, E, params, real, {});
  CHECK_FALSE(r.cnr);
  CHECK(*r.offender == cube);
  CHECK_THROWS_AS(is_cnr(MultiParticleCube(Config(1, {0}), 2), 0.0, params, real, {}), PreconditionError);
  CHECK(is_cnr(cube, 100.0, params, real, {}).cnr);
}

TEST_CASE("separated packing against exhaustive search") {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> coord(0, 30);
  for (int t = 0; t < 60; ++t) {
    std::vector<Config> pts;
    const int n = 1 + t % 13;
    for (int i = 0; i < n; ++i) pts.push_back(Config(1, {coord(rng), coord(rng)}));
    const int expected = exhaustive_packing(pts, 8);
    CHECK(max_separated_packing(pts, 8, 100) == expected);
    const int capped = max_separated_packing(pts, 8, 1);
    CHECK(capped == std::min(expected, 2));
  }
  CHECK(max_separated_packing({}, 3, 5) == 0);

  // Adding a point never lowers the packing size.
  for (int t = 0; t < 30; ++t) {
    std::vector<Config> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(Config(1, {coord(rng), coord(rng)}));
    int before = max_separated_packing(pts, 6, 100);
    for (int i = 0; i < 4; ++i) {
      pts.push_back(Config(1, {coord(rng), coord(rng)}));
      const int after = max_separated_packing(pts, 6, 100);
      CHECK(after >= before);
      before = after;
    }
  }
}

TEST_CASE("singular subcube count") {
  auto params = one_particle(2.0);
  const MultiParticleCube big(Config(1, {0}), 15);
  const auto real = DisorderRealization::sample(uniform(5.0), box_for(big), 1);
  std::vector<Config> singular;
  for (int c = -13; c <= 13; ++c) {
    const MultiParticleCube sub(Config(1, {c}), 2);
    if (!classify_cube(diagonalize(assemble(sub, real, {})), 0.5, params).ns) singular.push_back(sub.center());
  }
  REQUIRE(singular.size() <= 30);
  const auto count = count_singular_subcubes(big, 2, 0.5, params, real, {});
  CHECK(count.pi == 0);
  CHECK(count.fi == max_separated_packing(singular, 14, params.J()));
  CHECK(count.fi <= 2);
  CHECK_FALSE(count.exceeded);
  const auto none = count_singular_subcubes(big, 2, 1e6, params, real, {});
  CHECK(none.pi == 0);
  CHECK(none.fi == 0);
  CHECK_THROWS_AS(count_singular_subcubes(MultiParticleCube(Config(1, {0}), 14), 2, 0.5, params, real, {}),
                  ParameterError);
}

TEST_CASE("recursion arithmetic") {
  CHECK(recursion_rhs(2, 1, 22, 1e-3, 1e-5, 1e-5) == doctest::Approx(9.487388).epsilon(1e-7));
  CHECK(recursion_rhs(2, 1, 22, 0.0, 0.0, 0.0) == 0.0);
  MsaParams p;
  RecursionLedger ledger;
  const auto& r = recursion_step(ledger, 0, p, {1e-3, 1e-5, 1e-5, 0.5});
  CHECK(r.L_k == 8);
  CHECK(r.L_next == 22);
  CHECK(r.rhs_bound == doctest::Approx(9.487388).epsilon(1e-7));
  CHECK(r.paper_target == doctest::Approx(std::pow(22.0, -2.0 * 2.0 * 1.1)));
  CHECK(*r.holds);
  CHECK_THROWS_AS(recursion_step(ledger, 0, p, {1.5, 0.0, 0.0, std::nullopt}), ParameterError);
  CHECK(ledger.records.size() == 1);
  const auto& q = recursion_step(ledger, 1, p, {0.0, 0.0, 0.0, 0.1});
  CHECK_FALSE(*q.holds);
}

TEST_CASE("cover parameters and grid validation") {
  const auto c = cover_parameters(10, 10.0, 2, 1);
  CHECK(c.a == doctest::Approx(1e-2));
  CHECK(c.b == doctest::Approx(1e-8));
  CHECK(c.c == doctest::Approx(3e-2));
  MsaParams p;
  p.N = 1;
  p.n = 1;
  const MultiParticleCube cube(Config(1, {0}), 10);
  const auto spec = diagonalize(assemble(cube, DisorderRealization::sample(uniform(5.0), box_for(cube), 0), {}));
  const double b = cover_parameters(10, p.p_k(0), 1, 1).b;
  CHECK_THROWS_AS(energy_interval_cover(spec, p, 0, {-1.0, 1.0}, b), ParameterError);
  const auto r = energy_interval_cover(spec, p, 0, {0.0, 1.0}, b / 4.0);
  CHECK(r.grid_points > 0);
  CHECK(r.uncovered.empty());
  for (double E : r.bad_energies) {
    bool inside = false;
    for (const auto& iv : r.cover) inside = inside || iv.contains(E);
    CHECK(inside);
    CHECK(spec.distance_to_spectrum(E) <= 2.0 * cover_parameters(10, p.p_k(0), 1, 1).c);
  }
  const auto far = energy_interval_cover(spec, p, 0, {40.0, 40.001}, b / 4.0);
  CHECK(far.bad_energies.empty());
}

TEST_CASE("verdict json") {
  CubeVerdict v;
  v.ns = true;
  v.cnr = false;
  const auto j = verdict_to_json(v, MultiParticleCube(Config(1, {0, 3}), 2), 1.5, 0.01, 0.0);
  CHECK(j.at("ns").get<bool>());
  CHECK_FALSE(j.at("cnr").get<bool>());
}
