#include <algorithm>
#include <cmath>
#include <map>

#include "mploc/errors.hpp"
#include "mploc/experiments.hpp"
#include "mploc/parallel.hpp"

namespace mploc {

namespace {

// Singularity of a PI cube through the eigenpairs of its two factors.
class PiSingularity {
 public:
  PiSingularity(const DisorderRealization& realization, const InteractionSpec& interaction, const MsaParams& params)
      : realization_(realization), interaction_(interaction), params_(params) {}

  bool singular(const MultiParticleCube& cube, const InteractivityClass& split, double E) {
    const SpectralData& f1 = factor(cube.restrict_to(split.first));
    const SpectralData& f2 = factor(cube.restrict_to(split.second));
    const Eigen::Index d1 = f1.eigenvalues.size();
    const Eigen::Index d2 = f2.eigenvalues.size();
    Eigen::MatrixXd K(d1, d2);
    for (Eigen::Index i = 0; i < d1; ++i) {
      for (Eigen::Index j = 0; j < d2; ++j) {
        const double gap = f1.eigenvalues(i) + f2.eigenvalues(j) - E;
        if (!(std::abs(gap) > kSpectrumTolerance)) return true;
        K(i, j) = 1.0 / gap;
      }
    }
    const int L = cube.side();
    const double threshold = std::exp(-gamma(params_.m, L, cube.n(), params_.N) * L);
    const Config& u = cube.center();
    const auto u1 = static_cast<Eigen::Index>(f1.index(u.select(split.first)));
    const auto u2 = static_cast<Eigen::Index>(f2.index(u.select(split.second)));
    for (const auto& v : boundaries(cube).internal) {
      const auto v1 = static_cast<Eigen::Index>(f1.index(v.select(split.first)));
      const auto v2 = static_cast<Eigen::Index>(f2.index(v.select(split.second)));
      const Eigen::VectorXd a = f1.eigenvectors.row(u1).cwiseProduct(f1.eigenvectors.row(v1)).transpose();
      const Eigen::VectorXd b = f2.eigenvectors.row(u2).cwiseProduct(f2.eigenvectors.row(v2)).transpose();
      if (std::abs(a.dot(K * b)) > threshold) return true;
    }
    return false;
  }

 private:
  const SpectralData& factor(const MultiParticleCube& cube) {
    const auto key = cube.to_string();
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, diagonalize(assemble(cube, realization_, interaction_))).first;
    return it->second;
  }

  const DisorderRealization& realization_;
  const InteractionSpec& interaction_;
  const MsaParams& params_;
  std::map<std::string, SpectralData> cache_;
};

// Does the big cube contain a PI singular subcube of the given side?
bool contains_pi_singular(const MultiParticleCube& big, int side, double E, int stride, PiSingularity& oracle, int r0) {
  const int dim = big.center().dim();
  std::vector<int> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    lo[static_cast<std::size_t>(k)] = big.lower(k) + side;
    hi[static_cast<std::size_t>(k)] = big.upper(k) - side;
    if (hi[static_cast<std::size_t>(k)] < lo[static_cast<std::size_t>(k)]) return false;
  }
  std::vector<int> c = lo;
  while (true) {
    const MultiParticleCube sub(Config(big.d(), c), side);
    const auto split = classify_interactivity(sub, r0);
    if (split.kind == Interactivity::partially && oracle.singular(sub, split, E)) return true;
    int k = dim - 1;
    for (; k >= 0; --k) {
      auto ku = static_cast<std::size_t>(k);
      if (c[ku] + stride <= hi[ku]) {
        c[ku] += stride;
        break;
      }
      c[ku] = lo[ku];
    }
    if (k < 0) return false;
  }
}

struct RecursionCell {
  std::vector<char> small_singular;  // per offset
  bool big_resonant = false;
  bool pi_singular = false;
  bool big_singular = false;
};

// Centers for the sup over u of P_k: the last particle shifted by each offset.
std::vector<Config> small_centers(const MsaParams& params, int L_k) {
  std::vector<int> offsets{0};
  if (params.n > 1) offsets = {0, L_k, 2 * L_k + 2};
  std::vector<Config> out;
  for (int off : offsets) {
    std::vector<int> coords(static_cast<std::size_t>(params.n * params.d), 0);
    coords[static_cast<std::size_t>((params.n - 1) * params.d)] = off;
    out.emplace_back(params.d, coords);
  }
  return out;
}

}  // namespace

RecursionProbeReport recursion_probe(const TrialPlan& plan, int scales, int stride) {
  if (scales < 2) throw ParameterError("recursion probe needs at least two scales");
  if (stride < 1) throw ParameterError("scan stride must be >= 1");
  const MsaParams& params = plan.params;
  RecursionProbeReport report;
  for (int k = 0; k + 1 < scales; ++k) {
    const int L_k = params.scale(k);
    const int L_next = params.scale(k + 1);
    std::vector<MultiParticleCube> smalls;
    for (const auto& u : small_centers(params, L_k)) smalls.emplace_back(u, L_k);
    const MultiParticleCube big(Config::zeros(params.n, params.d), L_next);
    check_site_cap(big);
    SiteBox box = box_for(big);
    for (const auto& c : smalls) box = box_union(box, box_for(c));
    const auto energies = plan.energy_list(smalls.front());

    std::vector<std::vector<RecursionCell>> slots(plan.trials);
    parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
      const auto realization = plan.sample(box, t);
      std::vector<AssembledHamiltonian> H_small;
      for (const auto& c : smalls) H_small.push_back(assemble(c, realization, plan.interaction));
      const auto H_big = assemble(big, realization, plan.interaction);
      PiSingularity oracle(realization, plan.interaction, params);
      for (double E : energies) {
        RecursionCell cell;
        for (const auto& H : H_small) cell.small_singular.push_back(!classify_cube(H, E, params).ns);
        const auto v = classify_cube(H_big, E, params);
        cell.big_resonant = v.resonant;
        cell.big_singular = !v.ns;
        cell.pi_singular = params.n > 1 && contains_pi_singular(big, L_k, E, stride, oracle, plan.interaction.r0);
        slots[t].push_back(cell);
      }
    });

    for (std::size_t e = 0; e < energies.size(); ++e) {
      std::vector<std::size_t> p0(smalls.size(), 0);
      std::size_t q1 = 0, s1 = 0, p1 = 0;
      for (std::size_t t = 0; t < plan.trials; ++t) {
        const auto& c = slots[t][e];
        for (std::size_t i = 0; i < smalls.size(); ++i) p0[i] += c.small_singular[i];
        q1 += c.big_resonant;
        s1 += c.pi_singular;
        p1 += c.big_singular;
        report.trial_log.push_back({{"probe", "recursion"}, {"k", k}, {"trial", t}, {"E", energies[e]},
                                    {"small_singular", std::vector<bool>(c.small_singular.begin(), c.small_singular.end())},
                                    {"big_resonant", c.big_resonant},
                                    {"pi_singular", c.pi_singular}, {"big_singular", c.big_singular}});
      }
      RecursionProbeRow row;
      row.E = energies[e];
      const auto worst = std::max_element(p0.begin(), p0.end()) - p0.begin();
      row.P_k = EstimateReport::from_counts(p0[static_cast<std::size_t>(worst)], plan.trials);
      row.P_k_center = smalls[static_cast<std::size_t>(worst)].center();
      row.Q_next = EstimateReport::from_counts(q1, plan.trials);
      row.S_next = EstimateReport::from_counts(s1, plan.trials);
      row.P_next = EstimateReport::from_counts(p1, plan.trials);
      row.record = recursion_step(report.ledger, k, params,
                                  {row.P_k.point_estimate, row.Q_next.point_estimate, row.S_next.point_estimate,
                                   row.P_next.point_estimate});
      row.rhs_at_upper = recursion_rhs(params.n, params.d, L_next, row.P_k.ci_hi, row.Q_next.ci_hi, row.S_next.ci_hi);
      row.holds_at_ci = row.P_next.ci_lo <= row.rhs_at_upper;
      report.rows.push_back(row);
    }
  }
  return report;
}

CnrNsSurrogate cnr_ns_surrogate(const TrialPlan& plan, int L_k, int L_next, double E, int stride) {
  const MultiParticleCube big(Config::zeros(plan.params.n, plan.params.d), L_next);
  struct Cell {
    bool eligible = false;
    bool singular = false;
  };
  std::vector<Cell> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const auto realization = plan.sample(box_for(big), t);
    const bool cnr = is_cnr(big, E, plan.params, realization, plan.interaction, stride).cnr;
    if (!cnr) return;
    const auto count = count_singular_subcubes(big, L_k, E, plan.params, realization, plan.interaction, stride);
    if (count.exceeded || count.pi + count.fi > plan.params.J()) return;
    slots[t].eligible = true;
    slots[t].singular = !classify_cube(assemble(big, realization, plan.interaction), E, plan.params).ns;
  });
  CnrNsSurrogate out;
  out.L_k = L_k;
  out.L_next = L_next;
  std::size_t failures = 0;
  for (const auto& c : slots) {
    out.eligible += c.eligible;
    failures += c.eligible && c.singular;
  }
  out.ns_failure = EstimateReport::from_counts(failures, out.eligible);
  return out;
}

CoverReport cover_probe(const TrialPlan& plan, int L, int k, double grid_step) {
  const MultiParticleCube cube(Config::zeros(plan.params.n, plan.params.d), L);
  CoverReport report;
  report.L = L;
  report.k = k;
  report.params = cover_parameters(L, plan.params.p_k(k), plan.params.N, plan.params.d);
  report.grid_step = grid_step > 0.0 ? grid_step : report.params.b / 4.0;
  const Interval I = plan.spectrum_bounds(cube);
  std::vector<CoverResult> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const auto spec = diagonalize(assemble(cube, plan.sample(box_for(cube), t), plan.interaction));
    slots[t] = energy_interval_cover(spec, plan.params, k, I, report.grid_step);
  });
  for (std::size_t t = 0; t < plan.trials; ++t) {
    const auto& r = slots[t];
    report.condition_holds = r.condition_holds;
    report.condition_bound = r.condition_bound;
    report.grid_points = r.grid_points;
    report.bad_points += r.bad_energies.size();
    report.uncovered_points += r.uncovered.size();
    report.trial_log.push_back({{"probe", "cover"}, {"L", L}, {"trial", t}, {"bad", r.bad_energies.size()},
                                {"uncovered", r.uncovered.size()}, {"cover_intervals", r.cover.size()}});
  }
  return report;
}

}  // namespace mploc
