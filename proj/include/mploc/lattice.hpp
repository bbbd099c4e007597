#pragma once

// Multi-particle lattice geometry: configurations in (Z^d)^n, rectangular
// cubes with their boundaries, separability of cube pairs and the
// partially/fully interactive classification.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mploc {

// n points of Z^d, stored particle-major: coords[i*d + k] is coordinate k of
// particle i.
class Config {
 public:
  Config() = default;
  Config(int d, std::vector<int> coords);

  static Config zeros(int n, int d);

  int n() const noexcept { return static_cast<int>(coords_.size()) / d_; }
  int d() const noexcept { return d_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }

  std::span<const int> coords() const noexcept { return coords_; }
  std::span<const int> particle(int i) const;
  int operator[](std::size_t k) const { return coords_[k]; }

  // Sub-configuration keeping the listed particles, in the given order.
  Config select(std::span<const int> particles) const;
  // Concatenation of two configurations with the same d.
  Config join(const Config& other) const;

  std::string to_string() const;

  auto operator<=>(const Config&) const = default;

 private:
  int d_ = 1;
  std::vector<int> coords_;
};

// Max-norm distance over all nd coordinates.
int sup_distance(const Config& a, const Config& b);
int l1_distance(const Config& a, const Config& b);
// Max norm of a single-particle point difference.
int point_distance(std::span<const int> a, std::span<const int> b);

// Rectangle prod_i C_{L_i}(u_i) in Z^{nd}. Side length 0 is a single site.
class MultiParticleCube {
 public:
  MultiParticleCube(Config center, int side);
  MultiParticleCube(Config center, std::vector<int> sides);

  const Config& center() const noexcept { return center_; }
  int n() const noexcept { return center_.n(); }
  int d() const noexcept { return center_.d(); }
  std::span<const int> sides() const noexcept { return sides_; }
  bool equal_sides() const;
  // Common side length; throws ParameterError when sides differ.
  int side() const;

  std::size_t size() const noexcept { return size_; }
  bool contains(const Config& x) const;
  // Row-major lexicographic enumeration over the nd coordinates.
  std::optional<std::size_t> index_of(const Config& x) const;
  Config site(std::size_t index) const;
  std::vector<Config> sites() const;

  int lower(int coord) const;
  int upper(int coord) const;
  // Index offset between sites differing by one in the given coordinate.
  std::size_t stride(int coord) const { return strides_[static_cast<std::size_t>(coord)]; }

  // Sub-cube for a subset of the particles (product factor).
  MultiParticleCube restrict_to(std::span<const int> particles) const;

  std::string to_string() const;

  bool operator==(const MultiParticleCube& o) const {
    return center_ == o.center_ && sides_ == o.sides_;
  }

 private:
  Config center_;
  std::vector<int> sides_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

struct Boundaries {
  std::vector<Config> internal;  // in enumeration order
  std::vector<Config> external;  // sorted lexicographically
};

Boundaries boundaries(const MultiParticleCube& cube);
// Enumeration indices of the internal boundary, ascending.
std::vector<std::size_t> internal_boundary_indices(const MultiParticleCube& cube);

// kappa(n) = n^n.
long long kappa(int n);

struct SeparabilityVerdict {
  bool separable = false;
  // Zero-based particle indices of the witnessing set J.
  std::optional<std::vector<int>> witness_J;
  bool distance_ok = false;
  // True when C_L(x) is J-separable from C_L(y); false for the reverse.
  bool first_is_separated = true;
};

// First J (lexicographic over sorted index lists) for which C_L(x) is
// J-separable from C_L(y), if any.
std::optional<std::vector<int>> separating_subset(const Config& x, const Config& y, int L);

// Pair separability with the distance clause |x - y| > 7 N L.
SeparabilityVerdict is_separable(const Config& x, const Config& y, int L, int N);

// Centers of the kappa(n) cubes C_{2nL}(x^(l)) outside of which (and beyond
// 7NL) every y gives a separable pair. The l-th center has particle block i
// equal to x_{sigma(i)}, sigma running over all maps {1..n} -> {1..n}.
std::vector<Config> separability_collection(const Config& x, int L);

enum class Interactivity { partially, fully };

struct InteractivityClass {
  Interactivity kind = Interactivity::fully;
  // Canonical split (zero-based particle indices), filled for PI cubes.
  std::vector<int> first;
  std::vector<int> second;
  // Smallest max-norm distance between projections across the split.
  int gap = 0;
};

// Max-norm distance between the single-particle projections of particles i, j.
int projection_gap(const MultiParticleCube& cube, int i, int j);

InteractivityClass classify_interactivity(const MultiParticleCube& cube, int r0);

}  // namespace mploc
