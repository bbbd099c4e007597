#include "mploc/msa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mploc/errors.hpp"

namespace mploc {

void MsaParams::validate() const {
  if (N < 1) throw ParameterError("N must be >= 1");
  if (d < 1) throw ParameterError("d must be >= 1");
  if (n < 1 || n > N) throw ParameterError("n must lie in [1, N]");
  if (!(m > 0.0)) throw ParameterError("m must be > 0");
  if (!(p > 0.0)) throw ParameterError("p must be > 0");
  if (!(theta > 0.0 && theta < 1.0 / 3.0)) throw ParameterError("theta must lie in (0, 1/3)");
  if (!(alpha > 1.0)) throw ParameterError("alpha must be > 1");
  if (L0 < 2) throw ParameterError("L0 must be >= 2");
  if (!(resonance_exponent > 0.0 && resonance_exponent < 1.0))
    throw ParameterError("resonance exponent must lie in (0, 1)");
}

int MsaParams::J() const { return J_threshold >= 0 ? J_threshold : static_cast<int>(kappa(n)) + 5; }

int MsaParams::scale(int k) const {
  if (k < 0) throw ParameterError("scale index must be >= 0");
  double L = L0;
  for (int i = 0; i < k; ++i) {
    // Small guard so exact integer powers are not lost to rounding.
    L = std::floor(std::pow(L, alpha) + 1e-9);
    if (L > 1e9) throw ParameterError("scale L_" + std::to_string(k) + " overflows");
  }
  return static_cast<int>(L);
}

double MsaParams::p_k(int k) const { return p * std::pow(1.0 + theta, k); }

StrictCheck MsaParams::strict_check() const {
  StrictCheck out;
  const double p_min = 6.0 * N * d / (1.0 - 3.0 * theta);
  if (!(p > p_min)) out.violations.push_back("p = " + std::to_string(p) + " must exceed 6Nd/(1-3 theta) = " + std::to_string(p_min));
  const double m_max = 1.0 / (std::pow(2.0, N + 1) * 12.0 * N * d);
  if (!(m <= m_max)) out.violations.push_back("m = " + std::to_string(m) + " must not exceed " + std::to_string(m_max));
  out.strict = out.violations.empty();
  return out;
}

double gamma(double m, int L, int n, int N) {
  if (!(m > 0.0) || L < 1 || n < 1 || n > N) throw ParameterError("gamma needs m > 0, L >= 1 and 1 <= n <= N");
  return m * std::pow(1.0 + std::pow(static_cast<double>(L), -0.125), N - n + 1);
}

double resonance_threshold(int L, double exponent) { return std::exp(-std::pow(static_cast<double>(L), exponent)); }

namespace {

CubeVerdict base_verdict(const MultiParticleCube& cube, double eta, const MsaParams& params) {
  const int L = cube.side();
  CubeVerdict v;
  v.eta = eta;
  v.gamma_threshold = std::exp(-gamma(params.m, L, cube.n(), params.N) * L);
  v.resonant = eta <= resonance_threshold(L, params.resonance_exponent);
  return v;
}

std::size_t center_index(const MultiParticleCube& cube) { return *cube.index_of(cube.center()); }

}  // namespace

CubeVerdict classify_cube(const AssembledHamiltonian& H, double E, const MsaParams& params) {
  const double eta = distance_to_spectrum(eigenvalues_only(H), E);
  CubeVerdict v = base_verdict(H.cube, eta, params);
  if (!(eta > kSpectrumTolerance)) {
    v.resonant = true;
    v.max_boundary_green = std::numeric_limits<double>::infinity();
    return v;
  }
  const Eigen::VectorXd g = resolvent_column(H, E, center_index(H.cube));
  double worst = 0.0;
  for (std::size_t b : internal_boundary_indices(H.cube)) worst = std::max(worst, std::abs(g(static_cast<Eigen::Index>(b))));
  v.max_boundary_green = worst;
  v.ns = worst <= v.gamma_threshold;
  return v;
}

double boundary_green_max(const SpectralData& spec, double E) {
  if (!(spec.distance_to_spectrum(E) > kSpectrumTolerance)) return std::numeric_limits<double>::infinity();
  const std::size_t u = center_index(spec.cube);
  double worst = 0.0;
  for (std::size_t b : internal_boundary_indices(spec.cube)) worst = std::max(worst, std::abs(green(spec, E, u, b)));
  return worst;
}

std::vector<double> boundary_green_profile(const SpectralData& spec, std::span<const double> energies) {
  const auto boundary = internal_boundary_indices(spec.cube);
  const auto u = static_cast<Eigen::Index>(center_index(spec.cube));
  const auto nb = static_cast<Eigen::Index>(boundary.size());
  const Eigen::Index dim = spec.eigenvalues.size();
  Eigen::MatrixXd W(nb, dim);
  for (Eigen::Index b = 0; b < nb; ++b)
    W.row(b) = spec.eigenvectors.row(u).cwiseProduct(
        spec.eigenvectors.row(static_cast<Eigen::Index>(boundary[static_cast<std::size_t>(b)])));

  std::vector<double> out(energies.size(), 0.0);
  constexpr std::size_t chunk = 256;
  for (std::size_t start = 0; start < energies.size(); start += chunk) {
    const std::size_t len = std::min(chunk, energies.size() - start);
    Eigen::MatrixXd R(dim, static_cast<Eigen::Index>(len));
    for (std::size_t i = 0; i < len; ++i)
      R.col(static_cast<Eigen::Index>(i)) = (spec.eigenvalues.array() - energies[start + i]).inverse().matrix();
    const Eigen::MatrixXd G = W * R;
    for (std::size_t i = 0; i < len; ++i) {
      if (!(spec.distance_to_spectrum(energies[start + i]) > kSpectrumTolerance))
        out[start + i] = std::numeric_limits<double>::infinity();
      else if (nb > 0)
        out[start + i] = G.col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff();
    }
  }
  return out;
}

CubeVerdict classify_cube(const SpectralData& spec, double E, const MsaParams& params) {
  CubeVerdict v = base_verdict(spec.cube, spec.distance_to_spectrum(E), params);
  v.max_boundary_green = boundary_green_max(spec, E);
  if (!(v.eta > kSpectrumTolerance)) {
    v.resonant = true;
    return v;
  }
  v.ns = v.max_boundary_green <= v.gamma_threshold;
  return v;
}

namespace {

// Centers of side-ell subcubes inside the cube, lexicographic, on a stride.
template <typename F>
void for_each_subcube(const MultiParticleCube& cube, int ell, int stride, F&& f) {
  const int dim = cube.center().dim();
  std::vector<int> lo(static_cast<std::size_t>(dim));
  std::vector<int> hi(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    lo[static_cast<std::size_t>(k)] = cube.lower(k) + ell;
    hi[static_cast<std::size_t>(k)] = cube.upper(k) - ell;
    if (hi[static_cast<std::size_t>(k)] < lo[static_cast<std::size_t>(k)]) return;
  }
  std::vector<int> c = lo;
  while (true) {
    if (!f(MultiParticleCube(Config(cube.d(), c), ell))) return;
    int k = dim - 1;
    for (; k >= 0; --k) {
      auto ku = static_cast<std::size_t>(k);
      if (c[ku] + stride <= hi[ku]) {
        c[ku] += stride;
        break;
      }
      c[ku] = lo[ku];
    }
    if (k < 0) return;
  }
}

}  // namespace

CnrResult is_cnr(const MultiParticleCube& cube, double E, const MsaParams& params,
                 const DisorderRealization& realization, const InteractionSpec& interaction, int stride) {
  if (stride < 1) throw ParameterError("scan stride must be >= 1");
  const int L = cube.side();
  const double root = std::pow(static_cast<double>(L), 1.0 / params.alpha);
  if (root < 2.0 - 1e-12) throw PreconditionError("CNR scan needs L^{1/alpha} >= 2");
  const int min_side = static_cast<int>(std::ceil(root - 1e-9));
  CnrResult out;
  for (int ell = L; ell >= min_side && out.cnr; --ell) {
    const double threshold = resonance_threshold(ell, params.resonance_exponent);
    for_each_subcube(cube, ell, stride, [&](const MultiParticleCube& sub) {
      const auto H = assemble(sub, realization, interaction);
      if (distance_to_spectrum(eigenvalues_only(H), E) <= threshold) {
        out.cnr = false;
        out.offender = sub;
        return false;
      }
      return true;
    });
  }
  return out;
}

namespace {

struct Packer {
  const std::vector<std::vector<char>>& conflict;
  int cap;
  int best = 0;

  void search(std::vector<int>& candidates, int size) {
    if (best > cap) return;
    if (size + static_cast<int>(candidates.size()) <= best) return;
    if (candidates.empty()) {
      best = size;
      return;
    }
    const int v = candidates.front();
    std::vector<int> with;
    for (std::size_t i = 1; i < candidates.size(); ++i)
      if (!conflict[static_cast<std::size_t>(v)][static_cast<std::size_t>(candidates[i])]) with.push_back(candidates[i]);
    search(with, size + 1);
    std::vector<int> without(candidates.begin() + 1, candidates.end());
    search(without, size);
  }
};

}  // namespace

int max_separated_packing(const std::vector<Config>& points, int min_distance, int cap) {
  const std::size_t n = points.size();
  std::vector<std::vector<char>> conflict(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      conflict[i][j] = conflict[j][i] = sup_distance(points[i], points[j]) <= min_distance;
  Packer packer{conflict, cap};
  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  packer.search(all, 0);
  return std::min(packer.best, cap + 1);
}

SingularCount count_singular_subcubes(const MultiParticleCube& big, int small_side, double E,
                                      const MsaParams& params, const DisorderRealization& realization,
                                      const InteractionSpec& interaction, int stride) {
  if (stride < 1) throw ParameterError("scan stride must be >= 1");
  const int L_big = big.side();
  if (!(L_big > 7 * params.N * small_side))
    throw ParameterError("scale mismatch: " + std::to_string(L_big) + " is not above 7 N L_k = " +
                         std::to_string(7 * params.N * small_side));
  std::vector<Config> pi_centers;
  std::vector<Config> fi_centers;
  for_each_subcube(big, small_side, stride, [&](const MultiParticleCube& sub) {
    const auto verdict = classify_cube(assemble(sub, realization, interaction), E, params);
    if (!verdict.ns) {
      // Single-particle cubes have no split and are tallied as FI.
      const bool pi = sub.n() > 1 && classify_interactivity(sub, interaction.r0).kind == Interactivity::partially;
      (pi ? pi_centers : fi_centers).push_back(sub.center());
    }
    return true;
  });
  const int min_distance = 7 * params.N * small_side;
  SingularCount out;
  out.pi = max_separated_packing(pi_centers, min_distance, params.J());
  out.fi = max_separated_packing(fi_centers, min_distance, params.J());
  out.exceeded = out.pi > params.J() || out.fi > params.J();
  return out;
}

double recursion_rhs(int n, int d, int L_next, double P_k, double Q_next, double S_next) {
  const double e = 2.0 * n * d;
  return std::pow(3.0, e) / 2.0 * std::pow(static_cast<double>(L_next), e) * P_k * P_k + Q_next + S_next;
}

const RecursionRecord& recursion_step(RecursionLedger& ledger, int k, const MsaParams& params,
                                      const RecursionInputs& in) {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(in.P_k) || !unit(in.Q_next) || !unit(in.S_next) || (in.P_next && !unit(*in.P_next)))
    throw ParameterError("recursion inputs must be probabilities in [0, 1]");
  RecursionRecord r;
  r.k = k;
  r.L_k = params.scale(k);
  r.L_next = params.scale(k + 1);
  r.P_k = in.P_k;
  r.Q_next = in.Q_next;
  r.S_next = in.S_next;
  r.rhs_bound = recursion_rhs(params.n, params.d, r.L_next, in.P_k, in.Q_next, in.S_next);
  r.paper_target = std::pow(static_cast<double>(r.L_next),
                            -2.0 * params.p * std::pow(4.0, params.N - params.n) * std::pow(1.0 + params.theta, k + 1));
  r.P_next = in.P_next;
  if (in.P_next) r.holds = *in.P_next <= r.rhs_bound;
  ledger.records.push_back(r);
  return ledger.records.back();
}

CoverParameters cover_parameters(int L, double p_k, int N, int d) {
  const double Ld = L;
  return {std::pow(Ld, -p_k / 5.0), std::pow(Ld, -4.0 * p_k / 5.0), std::pow(3.0, N * d / 2.0) * std::pow(Ld, -p_k / 5.0)};
}

CoverResult energy_interval_cover(const SpectralData& spec, const MsaParams& params, int k, const Interval& I,
                                  double grid_step) {
  const int L = spec.cube.side();
  CoverResult out;
  out.params = cover_parameters(L, params.p_k(k), params.N, spec.cube.d());
  const auto& cp = out.params;
  if (!(grid_step > 0.0) || grid_step > cp.b / 4.0)
    throw ParameterError("grid step " + std::to_string(grid_step) + " is coarser than b/4 = " + std::to_string(cp.b / 4.0));
  if (!(I.hi >= I.lo)) throw ParameterError("energy interval is empty");
  out.condition_bound = std::min(cp.a * cp.c * cp.c / static_cast<double>(spec.cube.size()), cp.c);
  out.condition_holds = cp.b <= out.condition_bound;

  const auto count = static_cast<std::size_t>(std::floor((I.hi - I.lo) / grid_step + 1e-9)) + 1;
  out.grid_points = count;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = I.lo + static_cast<double>(i) * grid_step;
  const auto F = boundary_green_profile(spec, grid);
  for (std::size_t i = 0; i < count; ++i) {
    if (F[i] >= 2.0 * cp.a) {
      out.bad_energies.push_back(grid[i]);
      if (spec.distance_to_spectrum(grid[i]) > 2.0 * cp.c) out.uncovered.push_back(grid[i]);
    }
  }

  const Eigen::Index dim = spec.eigenvalues.size();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Interval iv{spec.eigenvalues(j) - 2.0 * cp.c, spec.eigenvalues(j) + 2.0 * cp.c};
    if (!out.cover.empty() && iv.lo <= out.cover.back().hi)
      out.cover.back().hi = std::max(out.cover.back().hi, iv.hi);
    else
      out.cover.push_back(iv);
  }
  return out;
}

nlohmann::json verdict_to_json(const CubeVerdict& v, const MultiParticleCube& cube, double E, double m, double h) {
  nlohmann::json j;
  j["cube"] = cube.to_string();
  j["E"] = E;
  j["m"] = m;
  j["h"] = h;
  j["ns"] = v.ns;
  j["resonant"] = v.resonant;
  j["cnr"] = v.cnr ? nlohmann::json(*v.cnr) : nlohmann::json(nullptr);
  j["max_boundary_green"] = std::isfinite(v.max_boundary_green) ? nlohmann::json(v.max_boundary_green) : nlohmann::json(nullptr);
  j["eta"] = v.eta;
  return j;
}

}  // namespace mploc
