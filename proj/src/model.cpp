#include "mploc/model.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "mploc/errors.hpp"

namespace mploc {

std::string to_string(DisorderFamily f) {
  switch (f) {
    case DisorderFamily::uniform: return "uniform";
    case DisorderFamily::truncated_gaussian: return "truncated-gaussian";
    case DisorderFamily::piecewise_density: return "piecewise-density";
    case DisorderFamily::constant: return "constant";
  }
  return "uniform";
}

DisorderFamily disorder_family_from_string(const std::string& s) {
  if (s == "uniform") return DisorderFamily::uniform;
  if (s == "truncated-gaussian") return DisorderFamily::truncated_gaussian;
  if (s == "piecewise-density") return DisorderFamily::piecewise_density;
  if (s == "constant") return DisorderFamily::constant;
  throw ParameterError("unknown disorder family '" + s + "'");
}

// --- DisorderSpec -----------------------------------------------------------

PiecewiseDensity DisorderSpec::effective_piecewise() const {
  if (!piecewise.edges.empty()) return piecewise;
  const double M = support_bound;
  return PiecewiseDensity{{-M, -0.5 * M, 0.5 * M, M}, {1.0, 2.0, 1.0}};
}

void DisorderSpec::validate() const {
  if (!(support_bound >= 0.0) || !std::isfinite(support_bound))
    throw ParameterError("support_bound must be finite and >= 0");
  if (!(density_weight_exponent > 0.0 && density_weight_exponent < 1.0))
    throw ParameterError("density_weight_exponent must lie in (0, 1)");
  const bool degenerate_ok = family == DisorderFamily::uniform || family == DisorderFamily::constant;
  if (support_bound == 0.0 && !degenerate_ok)
    throw ParameterError("support_bound = 0 is only allowed for uniform or constant disorder");
  if (family == DisorderFamily::truncated_gaussian && !(gaussian_sigma > 0.0))
    throw ParameterError("gaussian_sigma must be > 0");
  if (family == DisorderFamily::piecewise_density) {
    const auto pw = effective_piecewise();
    if (pw.edges.size() < 2 || pw.weights.size() + 1 != pw.edges.size())
      throw ParameterError("piecewise density needs k+1 edges for k weights");
    if (pw.edges.front() < -support_bound || pw.edges.back() > support_bound)
      throw ParameterError("piecewise density edges must lie in [-M, M]");
    double total = 0.0;
    for (std::size_t i = 0; i < pw.weights.size(); ++i) {
      if (!(pw.edges[i + 1] > pw.edges[i])) throw ParameterError("piecewise edges must increase");
      if (pw.weights[i] < 0.0) throw ParameterError("piecewise weights must be >= 0");
      total += pw.weights[i] * (pw.edges[i + 1] - pw.edges[i]);
    }
    if (!(total > 0.0)) throw ParameterError("piecewise density has zero mass");
  }
}

namespace {

struct GaussianWindow {
  boost::math::normal law;
  double lo_mass;
  double mass;
};

GaussianWindow gaussian_window(double M, double sigma) {
  boost::math::normal law(0.0, sigma);
  const double lo = boost::math::cdf(law, -M);
  const double hi = boost::math::cdf(law, M);
  return {law, lo, hi - lo};
}

}  // namespace

double DisorderSpec::cdf(double v) const {
  const double M = support_bound;
  if (v >= M) return 1.0;
  if (family == DisorderFamily::constant || M == 0.0) return 0.0;
  if (v < -M) return 0.0;
  switch (family) {
    case DisorderFamily::uniform:
      return (v + M) / (2.0 * M);
    case DisorderFamily::truncated_gaussian: {
      const auto g = gaussian_window(M, gaussian_sigma);
      return std::clamp((boost::math::cdf(g.law, v) - g.lo_mass) / g.mass, 0.0, 1.0);
    }
    case DisorderFamily::piecewise_density: {
      const auto pw = effective_piecewise();
      double total = 0.0;
      double below = 0.0;
      for (std::size_t i = 0; i < pw.weights.size(); ++i) {
        const double a = pw.edges[i];
        const double b = pw.edges[i + 1];
        total += pw.weights[i] * (b - a);
        below += pw.weights[i] * std::clamp(v - a, 0.0, b - a);
      }
      return below / total;
    }
    case DisorderFamily::constant:
      break;
  }
  return 0.0;
}

double DisorderSpec::quantile(double u) const {
  const double M = support_bound;
  if (family == DisorderFamily::constant) return M;
  if (M == 0.0) return 0.0;
  u = std::clamp(u, 0.0, 1.0);
  switch (family) {
    case DisorderFamily::uniform:
      return std::clamp(-M + 2.0 * M * u, -M, M);
    case DisorderFamily::truncated_gaussian: {
      const auto g = gaussian_window(M, gaussian_sigma);
      const double p = std::clamp(g.lo_mass + u * g.mass, std::numeric_limits<double>::min(),
                                  1.0 - std::numeric_limits<double>::epsilon());
      return std::clamp(boost::math::quantile(g.law, p), -M, M);
    }
    case DisorderFamily::piecewise_density: {
      const auto pw = effective_piecewise();
      double total = 0.0;
      for (std::size_t i = 0; i < pw.weights.size(); ++i)
        total += pw.weights[i] * (pw.edges[i + 1] - pw.edges[i]);
      double target = u * total;
      for (std::size_t i = 0; i < pw.weights.size(); ++i) {
        const double width = pw.edges[i + 1] - pw.edges[i];
        const double mass = pw.weights[i] * width;
        if (target < mass && pw.weights[i] > 0.0) return pw.edges[i] + target / pw.weights[i];
        target -= mass;
      }
      return pw.edges.back();
    }
    case DisorderFamily::constant:
      break;
  }
  return M;
}

double continuity_modulus(const DisorderSpec& spec, double eps) {
  if (!(eps > 0.0)) throw ParameterError("continuity modulus needs eps > 0");
  spec.validate();
  const double M = spec.support_bound;
  if (spec.family == DisorderFamily::constant || M == 0.0) return 1.0;
  if (eps >= 2.0 * M) return 1.0;

  auto window = [&](double a) { return spec.cdf(a + eps) - spec.cdf(a); };
  double best = 0.0;
  constexpr int grid = 20000;
  const double lo = -M - eps;
  const double step = (2.0 * M + eps) / grid;
  for (int i = 0; i <= grid; ++i) best = std::max(best, window(lo + i * step));
  std::vector<double> anchors{-M, M - eps, -0.5 * eps};
  if (spec.family == DisorderFamily::piecewise_density) {
    for (double e : spec.effective_piecewise().edges) {
      anchors.push_back(e);
      anchors.push_back(e - eps);
    }
  }
  for (double a : anchors) best = std::max(best, window(a));
  return std::min(best, 1.0);
}

// --- seeds ------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

double unit_uniform(std::uint64_t key) noexcept {
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

namespace {

std::uint64_t site_key(std::uint64_t trial_seed, std::span<const int> point) {
  std::uint64_t h = trial_seed;
  for (int c : point) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  return mix64(h);
}

}  // namespace

// --- SiteBox ----------------------------------------------------------------

std::size_t SiteBox::size() const {
  std::size_t s = 1;
  for (std::size_t k = 0; k < lo.size(); ++k) s *= static_cast<std::size_t>(hi[k] - lo[k] + 1);
  return s;
}

bool SiteBox::contains(std::span<const int> point) const {
  if (point.size() != lo.size()) return false;
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (point[k] < lo[k] || point[k] > hi[k]) return false;
  return true;
}

std::size_t SiteBox::index_of(std::span<const int> point) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < lo.size(); ++k)
    idx = idx * static_cast<std::size_t>(hi[k] - lo[k] + 1) + static_cast<std::size_t>(point[k] - lo[k]);
  return idx;
}

SiteBox box_for(const MultiParticleCube& cube) {
  const int d = cube.d();
  SiteBox box{std::vector<int>(static_cast<std::size_t>(d), std::numeric_limits<int>::max()),
              std::vector<int>(static_cast<std::size_t>(d), std::numeric_limits<int>::min())};
  for (int i = 0; i < cube.n(); ++i) {
    for (int k = 0; k < d; ++k) {
      const int coord = i * d + k;
      box.lo[static_cast<std::size_t>(k)] = std::min(box.lo[static_cast<std::size_t>(k)], cube.lower(coord));
      box.hi[static_cast<std::size_t>(k)] = std::max(box.hi[static_cast<std::size_t>(k)], cube.upper(coord));
    }
  }
  return box;
}

SiteBox box_union(const SiteBox& a, const SiteBox& b) {
  if (a.d() != b.d()) throw DimensionError("site boxes of different dimension");
  SiteBox out = a;
  for (std::size_t k = 0; k < a.lo.size(); ++k) {
    out.lo[k] = std::min(a.lo[k], b.lo[k]);
    out.hi[k] = std::max(a.hi[k], b.hi[k]);
  }
  return out;
}

// --- DisorderRealization ----------------------------------------------------

DisorderRealization DisorderRealization::sample(const DisorderSpec& spec, const SiteBox& box,
                                                std::uint64_t trial_index) {
  spec.validate();
  if (box.lo.empty() || box.lo.size() != box.hi.size()) throw ParameterError("empty site box");
  for (std::size_t k = 0; k < box.lo.size(); ++k)
    if (box.hi[k] < box.lo[k]) throw ParameterError("empty site box");

  DisorderRealization r;
  r.box_ = box;
  r.seed_ = split_seed(spec.master_seed, trial_index);
  r.spec_ = spec;
  r.values_.resize(box.size());
  std::vector<int> point(box.lo);
  for (std::size_t idx = 0; idx < r.values_.size(); ++idx) {
    r.values_[idx] = spec.quantile(unit_uniform(site_key(r.seed_, point)));
    for (int k = box.d() - 1; k >= 0; --k) {
      auto ku = static_cast<std::size_t>(k);
      if (++point[ku] <= box.hi[ku]) break;
      point[ku] = box.lo[ku];
    }
  }
  return r;
}

DisorderRealization DisorderRealization::from_function(
    const SiteBox& box, const std::function<double(std::span<const int>)>& f) {
  DisorderRealization r;
  r.box_ = box;
  r.values_.resize(box.size());
  std::vector<int> point(box.lo);
  for (std::size_t idx = 0; idx < r.values_.size(); ++idx) {
    r.values_[idx] = f(point);
    for (int k = box.d() - 1; k >= 0; --k) {
      auto ku = static_cast<std::size_t>(k);
      if (++point[ku] <= box.hi[ku]) break;
      point[ku] = box.lo[ku];
    }
  }
  return r;
}

double DisorderRealization::at(std::span<const int> point) const {
  if (!box_.contains(point)) throw CoverageError("site outside the disorder realization box");
  return values_[box_.index_of(point)];
}

bool DisorderRealization::covers(const MultiParticleCube& cube) const {
  if (cube.d() != box_.d()) return false;
  const SiteBox need = box_for(cube);
  for (std::size_t k = 0; k < need.lo.size(); ++k)
    if (need.lo[k] < box_.lo[k] || need.hi[k] > box_.hi[k]) return false;
  return true;
}

// --- interaction ------------------------------------------------------------

void InteractionSpec::validate() const {
  if (r0 < 0) throw ParameterError("interaction range r0 must be >= 0");
  if (phi.size() != static_cast<std::size_t>(r0) + 1)
    throw ParameterError("interaction table phi must have r0 + 1 entries");
  if (!std::isfinite(h)) throw ParameterError("interaction amplitude h must be finite");
}

double InteractionSpec::phi_at(int r) const noexcept {
  if (r < 0 || r > r0 || static_cast<std::size_t>(r) >= phi.size()) return 0.0;
  return phi[static_cast<std::size_t>(r)];
}

double interaction_energy(const Config& x, const InteractionSpec& spec) {
  double u = 0.0;
  for (int i = 0; i < x.n(); ++i)
    for (int j = i + 1; j < x.n(); ++j) u += spec.phi_at(point_distance(x.particle(i), x.particle(j)));
  return u;
}

double interaction_norm(const MultiParticleCube& cube, const InteractionSpec& spec) {
  double best = 0.0;
  if (cube.n() < 2) return best;
  for (std::size_t i = 0; i < cube.size(); ++i)
    best = std::max(best, std::abs(interaction_energy(cube.site(i), spec)));
  return best;
}

// --- assembly ---------------------------------------------------------------

std::size_t site_cap() {
  constexpr std::size_t fallback = 6000;
  const char* env = std::getenv("MPLOC_SITE_CAP");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0)
    throw ParameterError(std::string("MPLOC_SITE_CAP is not a positive integer: ") + env);
  return static_cast<std::size_t>(v);
}

void check_site_cap(const MultiParticleCube& cube) {
  const std::size_t cap = site_cap();
  if (cube.size() > cap)
    throw ResourceError("cube " + cube.to_string() + " has " + std::to_string(cube.size()) +
                        " sites, above the cap of " + std::to_string(cap));
}

std::size_t AssembledHamiltonian::bandwidth() const {
  std::size_t bw = 0;
  for (int k = 0; k < cube.center().dim(); ++k)
    if (cube.upper(k) > cube.lower(k)) bw = std::max(bw, cube.stride(k));
  return bw;
}

AssembledHamiltonian assemble(const MultiParticleCube& cube, const DisorderRealization& realization,
                              const InteractionSpec& interaction) {
  interaction.validate();
  check_site_cap(cube);
  if (!realization.covers(cube))
    throw CoverageError("disorder realization does not cover cube " + cube.to_string());

  const auto dim = static_cast<Eigen::Index>(cube.size());
  AssembledHamiltonian H{cube, Eigen::MatrixXd::Zero(dim, dim), interaction.h, realization.seed()};
  const double laplacian_diag = 2.0 * cube.d() * cube.n();
  const int coords = cube.center().dim();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Config x = cube.site(static_cast<std::size_t>(i));
    double diag = laplacian_diag;
    for (int j = 0; j < x.n(); ++j) diag += realization.at(x.particle(j));
    if (interaction.h != 0.0) diag += interaction.h * interaction_energy(x, interaction);
    H.matrix(i, i) = diag;
    for (int k = 0; k < coords; ++k) {
      if (x[static_cast<std::size_t>(k)] < cube.upper(k)) {
        const auto j = i + static_cast<Eigen::Index>(cube.stride(k));
        H.matrix(i, j) = -1.0;
        H.matrix(j, i) = -1.0;
      }
    }
  }
  return H;
}

Interval spectrum_interval(int N, int d, double M, double h, double U_norm) {
  if (N < 1 || d < 1 || M < 0.0 || U_norm < 0.0)
    throw ParameterError("spectrum interval needs N, d >= 1 and M, |U| >= 0");
  const double reach = N * (4.0 * d + M) + std::abs(h) * U_norm;
  return Interval{-1.0 - reach, reach + 1.0};
}

}  // namespace mploc
