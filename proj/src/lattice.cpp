#include "mploc/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "mploc/errors.hpp"

namespace mploc {

Config::Config(int d, std::vector<int> coords) : d_(d), coords_(std::move(coords)) {
  if (d_ < 1) throw DimensionError("configuration dimension d must be >= 1");
  if (coords_.empty() || coords_.size() % static_cast<std::size_t>(d_) != 0)
    throw DimensionError("configuration needs n >= 1 points of Z^" + std::to_string(d_));
}

Config Config::zeros(int n, int d) {
  if (n < 1) throw DimensionError("particle count must be >= 1");
  return Config(d, std::vector<int>(static_cast<std::size_t>(n * d), 0));
}

std::span<const int> Config::particle(int i) const {
  if (i < 0 || i >= n()) throw DimensionError("particle index out of range");
  return std::span<const int>(coords_).subspan(static_cast<std::size_t>(i * d_),
                                               static_cast<std::size_t>(d_));
}

Config Config::select(std::span<const int> particles) const {
  std::vector<int> out;
  out.reserve(particles.size() * static_cast<std::size_t>(d_));
  for (int p : particles) {
    auto pt = particle(p);
    out.insert(out.end(), pt.begin(), pt.end());
  }
  return Config(d_, std::move(out));
}

Config Config::join(const Config& other) const {
  if (other.d_ != d_) throw DimensionError("cannot join configurations of different d");
  std::vector<int> out = coords_;
  out.insert(out.end(), other.coords_.begin(), other.coords_.end());
  return Config(d_, std::move(out));
}

std::string Config::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < n(); ++i) {
    if (i) os << ';';
    for (int k = 0; k < d_; ++k) {
      if (k) os << ',';
      os << coords_[static_cast<std::size_t>(i * d_ + k)];
    }
  }
  os << ')';
  return os.str();
}

namespace {

void require_same_shape(const Config& a, const Config& b) {
  if (a.d() != b.d() || a.n() != b.n())
    throw DimensionError("configurations " + a.to_string() + " and " + b.to_string() +
                         " have different (n, d)");
}

}  // namespace

int sup_distance(const Config& a, const Config& b) {
  require_same_shape(a, b);
  int best = 0;
  for (int k = 0; k < a.dim(); ++k)
    best = std::max(best, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
  return best;
}

int l1_distance(const Config& a, const Config& b) {
  require_same_shape(a, b);
  int sum = 0;
  for (int k = 0; k < a.dim(); ++k)
    sum += std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
  return sum;
}

int point_distance(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionError("points of different dimension");
  int best = 0;
  for (std::size_t k = 0; k < a.size(); ++k) best = std::max(best, std::abs(a[k] - b[k]));
  return best;
}

// --- MultiParticleCube ------------------------------------------------------

MultiParticleCube::MultiParticleCube(Config center, int side)
    : MultiParticleCube(center, std::vector<int>(static_cast<std::size_t>(center.n()), side)) {}

MultiParticleCube::MultiParticleCube(Config center, std::vector<int> sides)
    : center_(std::move(center)), sides_(std::move(sides)) {
  if (static_cast<int>(sides_.size()) != center_.n())
    throw DimensionError("cube needs one side length per particle");
  for (int s : sides_)
    if (s < 0) throw ParameterError("cube side lengths must be non-negative");

  const int dim = center_.dim();
  strides_.assign(static_cast<std::size_t>(dim), 1);
  std::size_t acc = 1;
  for (int k = dim - 1; k >= 0; --k) {
    strides_[static_cast<std::size_t>(k)] = acc;
    const auto extent = static_cast<std::size_t>(2 * sides_[static_cast<std::size_t>(k / d())] + 1);
    if (acc > std::numeric_limits<std::size_t>::max() / extent)
      throw ParameterError("cube cardinality overflows");
    acc *= extent;
  }
  size_ = acc;
}

bool MultiParticleCube::equal_sides() const {
  return std::adjacent_find(sides_.begin(), sides_.end(), std::not_equal_to<>()) == sides_.end();
}

int MultiParticleCube::side() const {
  if (!equal_sides()) throw ParameterError("cube " + to_string() + " has unequal sides");
  return sides_.front();
}

int MultiParticleCube::lower(int coord) const {
  return center_[static_cast<std::size_t>(coord)] - sides_[static_cast<std::size_t>(coord / d())];
}

int MultiParticleCube::upper(int coord) const {
  return center_[static_cast<std::size_t>(coord)] + sides_[static_cast<std::size_t>(coord / d())];
}

bool MultiParticleCube::contains(const Config& x) const {
  if (x.d() != d() || x.n() != n()) return false;
  for (int k = 0; k < x.dim(); ++k) {
    const int v = x[static_cast<std::size_t>(k)];
    if (v < lower(k) || v > upper(k)) return false;
  }
  return true;
}

std::optional<std::size_t> MultiParticleCube::index_of(const Config& x) const {
  if (!contains(x)) return std::nullopt;
  std::size_t idx = 0;
  for (int k = 0; k < x.dim(); ++k)
    idx += static_cast<std::size_t>(x[static_cast<std::size_t>(k)] - lower(k)) * strides_[static_cast<std::size_t>(k)];
  return idx;
}

Config MultiParticleCube::site(std::size_t index) const {
  if (index >= size_) throw DimensionError("site index out of range");
  std::vector<int> coords(static_cast<std::size_t>(center_.dim()));
  for (std::size_t k = 0; k < coords.size(); ++k) {
    coords[k] = lower(static_cast<int>(k)) + static_cast<int>(index / strides_[k]);
    index %= strides_[k];
  }
  return Config(d(), std::move(coords));
}

std::vector<Config> MultiParticleCube::sites() const {
  std::vector<Config> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(site(i));
  return out;
}

MultiParticleCube MultiParticleCube::restrict_to(std::span<const int> particles) const {
  std::vector<int> sides;
  for (int p : particles) sides.push_back(sides_.at(static_cast<std::size_t>(p)));
  return MultiParticleCube(center_.select(particles), std::move(sides));
}

std::string MultiParticleCube::to_string() const {
  std::ostringstream os;
  os << "C" << center_.to_string() << "[L=";
  if (equal_sides()) {
    os << sides_.front();
  } else {
    for (std::size_t i = 0; i < sides_.size(); ++i) os << (i ? "," : "") << sides_[i];
  }
  os << ']';
  return os.str();
}

// --- boundaries -------------------------------------------------------------

namespace {

bool on_face(const MultiParticleCube& cube, const Config& x) {
  for (int k = 0; k < x.dim(); ++k) {
    const int v = x[static_cast<std::size_t>(k)];
    if (v == cube.lower(k) || v == cube.upper(k)) return true;
  }
  return false;
}

}  // namespace

std::vector<std::size_t> internal_boundary_indices(const MultiParticleCube& cube) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cube.size(); ++i)
    if (on_face(cube, cube.site(i))) out.push_back(i);
  return out;
}

Boundaries boundaries(const MultiParticleCube& cube) {
  Boundaries b;
  for (std::size_t i : internal_boundary_indices(cube)) b.internal.push_back(cube.site(i));

  std::vector<int> grown = std::vector<int>(cube.sides().begin(), cube.sides().end());
  for (int& s : grown) ++s;
  MultiParticleCube shell(cube.center(), grown);
  for (std::size_t i = 0; i < shell.size(); ++i) {
    Config x = shell.site(i);
    if (!cube.contains(x)) b.external.push_back(std::move(x));
  }
  return b;
}

// --- separability -----------------------------------------------------------

long long kappa(int n) {
  long long k = 1;
  for (int i = 0; i < n; ++i) k *= n;
  return k;
}

namespace {

// Single-particle cubes C_L(a), C_L(b) are disjoint iff |a - b| > 2L.
bool disjoint(std::span<const int> a, std::span<const int> b, int L) {
  return point_distance(a, b) > 2 * L;
}

bool separates(const Config& x, const Config& y, int L, const std::vector<bool>& in_j) {
  const int n = x.n();
  for (int j = 0; j < n; ++j) {
    if (!in_j[static_cast<std::size_t>(j)]) continue;
    for (int k = 0; k < n; ++k)
      if (!in_j[static_cast<std::size_t>(k)] && !disjoint(x.particle(j), x.particle(k), L)) return false;
    for (int k = 0; k < y.n(); ++k)
      if (!disjoint(x.particle(j), y.particle(k), L)) return false;
  }
  return true;
}

// Depth-first preorder over sorted index lists yields lexicographic order.
bool visit_subsets(int n, std::vector<int>& current, int next,
                   const std::function<bool(const std::vector<int>&)>& fn) {
  for (int i = next; i < n; ++i) {
    current.push_back(i);
    if (fn(current)) return true;
    if (visit_subsets(n, current, i + 1, fn)) return true;
    current.pop_back();
  }
  return false;
}

}  // namespace

std::optional<std::vector<int>> separating_subset(const Config& x, const Config& y, int L) {
  require_same_shape(x, y);
  const int n = x.n();
  std::optional<std::vector<int>> found;
  std::vector<int> current;
  visit_subsets(n, current, 0, [&](const std::vector<int>& J) {
    std::vector<bool> in_j(static_cast<std::size_t>(n), false);
    for (int j : J) in_j[static_cast<std::size_t>(j)] = true;
    if (separates(x, y, L, in_j)) {
      found = J;
      return true;
    }
    return false;
  });
  return found;
}

SeparabilityVerdict is_separable(const Config& x, const Config& y, int L, int N) {
  SeparabilityVerdict v;
  v.distance_ok = sup_distance(x, y) > 7 * N * L;
  if (auto J = separating_subset(x, y, L)) {
    v.witness_J = std::move(J);
    v.first_is_separated = true;
  } else if (auto J2 = separating_subset(y, x, L)) {
    v.witness_J = std::move(J2);
    v.first_is_separated = false;
  }
  v.separable = v.distance_ok && v.witness_J.has_value();
  return v;
}

std::vector<Config> separability_collection(const Config& x, int L) {
  if (L <= 1) throw ParameterError("separability collection requires L > 1");
  const int n = x.n();
  std::vector<Config> centers;
  centers.reserve(static_cast<std::size_t>(kappa(n)));
  std::vector<int> sigma(static_cast<std::size_t>(n), 0);
  for (long long l = 0; l < kappa(n); ++l) {
    centers.push_back(x.select(sigma));
    for (int pos = n - 1; pos >= 0; --pos) {
      if (++sigma[static_cast<std::size_t>(pos)] < n) break;
      sigma[static_cast<std::size_t>(pos)] = 0;
    }
  }
  return centers;
}

// --- interactivity ----------------------------------------------------------

int projection_gap(const MultiParticleCube& cube, int i, int j) {
  auto a = cube.center().particle(i);
  auto b = cube.center().particle(j);
  const int reach = cube.sides()[static_cast<std::size_t>(i)] + cube.sides()[static_cast<std::size_t>(j)];
  int gap = 0;
  for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(a[k] - b[k]) - reach);
  return std::max(gap, 0);
}

InteractivityClass classify_interactivity(const MultiParticleCube& cube, int r0) {
  const int n = cube.n();
  if (n < 2) throw ClassificationError("interactivity is undefined for a single particle");
  if (r0 < 0) throw ParameterError("interaction range r0 must be non-negative");

  InteractivityClass best;
  best.kind = Interactivity::fully;
  int best_gap = -1;
  // Particle 0 always sits in the first group; mask runs over the others.
  const unsigned full = (1u << (n - 1)) - 1u;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> splits;
  for (unsigned mask = 0; mask < full; ++mask) {
    std::vector<int> first{0};
    std::vector<int> second;
    for (int p = 1; p < n; ++p)
      ((mask >> (p - 1)) & 1u ? first : second).push_back(p);
    splits.emplace_back(std::move(first), std::move(second));
  }
  std::sort(splits.begin(), splits.end());
  for (auto& [first, second] : splits) {
    int gap = std::numeric_limits<int>::max();
    for (int a : first)
      for (int b : second) gap = std::min(gap, projection_gap(cube, a, b));
    if (gap > r0 && gap > best_gap) {
      best_gap = gap;
      best.kind = Interactivity::partially;
      best.first = first;
      best.second = second;
      best.gap = gap;
    }
  }
  return best;
}

}  // namespace mploc
