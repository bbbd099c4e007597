#pragma once

// Random potential, inter-particle interaction and assembly of the
// restricted n-particle Hamiltonian
//   H = -Laplacian + sum_j V(x_j) + h U(x)
// on a cube with simple boundary conditions.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mploc/lattice.hpp"

namespace mploc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  double width() const noexcept { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

enum class DisorderFamily { uniform, truncated_gaussian, piecewise_density, constant };

std::string to_string(DisorderFamily f);
DisorderFamily disorder_family_from_string(const std::string& s);

// Piecewise-constant density on [edges.front(), edges.back()]; weights are
// relative heights per bin.
struct PiecewiseDensity {
  std::vector<double> edges;
  std::vector<double> weights;
  bool operator==(const PiecewiseDensity&) const = default;
};

// Single-site law of the i.i.d. field V. `constant` puts all mass on M and
// only serves as a deterministic control; it has no density.
struct DisorderSpec {
  DisorderFamily family = DisorderFamily::uniform;
  double support_bound = 1.0;            // M
  double density_weight_exponent = 0.5;  // kappa in (0,1); validated, not used
  std::uint64_t master_seed = 0;
  double gaussian_sigma = 0.5;           // truncated-gaussian width
  PiecewiseDensity piecewise;            // empty -> default three-bin profile

  void validate() const;
  double cdf(double v) const;
  // Inverse distribution function on [0, 1).
  double quantile(double u) const;
  // Piecewise bins actually in use (default profile when none given).
  PiecewiseDensity effective_piecewise() const;

  bool operator==(const DisorderSpec&) const = default;
};

// s(mu, eps) = sup_a mu([a, a + eps]), evaluated on a grid plus the
// breakpoints of the law.
double continuity_modulus(const DisorderSpec& spec, double eps);

// Counter-based seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept;
double unit_uniform(std::uint64_t key) noexcept;

// Axis-aligned box of single-particle sites in Z^d.
struct SiteBox {
  std::vector<int> lo;
  std::vector<int> hi;

  int d() const noexcept { return static_cast<int>(lo.size()); }
  std::size_t size() const;
  bool contains(std::span<const int> point) const;
  std::size_t index_of(std::span<const int> point) const;
  bool operator==(const SiteBox&) const = default;
};

// Smallest box containing every single-particle projection of the cube.
SiteBox box_for(const MultiParticleCube& cube);
SiteBox box_union(const SiteBox& a, const SiteBox& b);

class DisorderRealization {
 public:
  // Values are a pure function of (master_seed, trial, site coordinates), so
  // overlapping boxes of the same trial agree on shared sites.
  static DisorderRealization sample(const DisorderSpec& spec, const SiteBox& box,
                                    std::uint64_t trial_index);
  static DisorderRealization from_function(const SiteBox& box,
                                           const std::function<double(std::span<const int>)>& f);

  double at(std::span<const int> point) const;
  bool covers(const MultiParticleCube& cube) const;

  const SiteBox& box() const noexcept { return box_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::optional<DisorderSpec>& spec() const noexcept { return spec_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  SiteBox box_;
  std::uint64_t seed_ = 0;
  std::optional<DisorderSpec> spec_;
  std::vector<double> values_;
};

// Phi tabulated on 0..r0; Phi(r) = 0 beyond r0.
struct InteractionSpec {
  std::vector<double> phi{1.0, 1.0};
  int r0 = 1;
  double h = 0.0;

  void validate() const;
  double phi_at(int r) const noexcept;
  bool operator==(const InteractionSpec&) const = default;
};

// U(x) = sum_{i<j} Phi(|x_i - x_j|), without the amplitude h.
double interaction_energy(const Config& x, const InteractionSpec& spec);
// max over cube sites of |U|.
double interaction_norm(const MultiParticleCube& cube, const InteractionSpec& spec);

// Dense-matrix dimension cap; MPLOC_SITE_CAP overrides the default 6000.
std::size_t site_cap();
void check_site_cap(const MultiParticleCube& cube);

struct AssembledHamiltonian {
  MultiParticleCube cube;
  Eigen::MatrixXd matrix;
  double h = 0.0;
  std::uint64_t realization_id = 0;

  // Half bandwidth of the matrix in the cube's enumeration order.
  std::size_t bandwidth() const;
};

AssembledHamiltonian assemble(const MultiParticleCube& cube, const DisorderRealization& realization,
                              const InteractionSpec& interaction);

// [-1 - N(4d+M) - |h| U, N(4d+M) + |h| U + 1]
Interval spectrum_interval(int N, int d, double M, double h, double U_norm);

}  // namespace mploc
