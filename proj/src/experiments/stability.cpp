#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "mploc/errors.hpp"
#include "mploc/experiments.hpp"
#include "mploc/parallel.hpp"

namespace mploc {

SecondResolvent second_resolvent_check(const Eigen::MatrixXd& H0, const Eigen::VectorXd& U, double h, double E) {
  const auto n = H0.rows();
  if (H0.cols() != n || U.size() != n) throw DimensionError("second resolvent check needs matching sizes");
  const Eigen::MatrixXd A0 = H0 - E * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Ah = A0;
  Ah.diagonal() += h * U;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s0(A0), sh(Ah);
  const double eta0 = s0.eigenvalues().cwiseAbs().minCoeff();
  const double etah = sh.eigenvalues().cwiseAbs().minCoeff();
  SecondResolvent out;
  if (!(eta0 > kSpectrumTolerance && etah > kSpectrumTolerance)) {
    out.exists = false;
    return out;
  }
  const Eigen::MatrixXd G0 = s0.eigenvectors() * s0.eigenvalues().cwiseInverse().asDiagonal() * s0.eigenvectors().transpose();
  const Eigen::MatrixXd Gh = sh.eigenvectors() * sh.eigenvalues().cwiseInverse().asDiagonal() * sh.eigenvectors().transpose();
  const Eigen::MatrixXd diff = G0 - Gh;
  out.lhs = n > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(diff, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  const double U_norm = n > 0 ? U.cwiseAbs().maxCoeff() : 0.0;
  out.rhs = std::abs(h) * U_norm / (eta0 * etah);
  // Relative slack for rounding in the two inversions.
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-14;
  return out;
}

namespace {

struct StabilityCell {
  SecondResolvent check;
  bool singular = false;
};

}  // namespace

StabilityReport weak_interaction_stability(const TrialPlan& plan, const std::vector<double>& h_list, int L) {
  std::vector<double> hs = h_list;
  if (std::find(hs.begin(), hs.end(), 0.0) == hs.end()) hs.push_back(0.0);
  std::sort(hs.begin(), hs.end(), [](double a, double b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); });

  const MultiParticleCube cube(Config::zeros(plan.params.n, plan.params.d), L);
  const auto energies = plan.energy_list(cube);
  InteractionSpec free = plan.interaction;
  free.h = 0.0;
  const auto sites = cube.sites();
  Eigen::VectorXd U(static_cast<Eigen::Index>(sites.size()));
  for (std::size_t i = 0; i < sites.size(); ++i) U(static_cast<Eigen::Index>(i)) = interaction_energy(sites[i], plan.interaction);

  // slots[t][e * hs.size() + k]
  std::vector<std::vector<StabilityCell>> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const auto H0 = assemble(cube, plan.sample(box_for(cube), t), free);
    for (double E : energies) {
      for (double h : hs) {
        StabilityCell cell;
        cell.check = second_resolvent_check(H0.matrix, U, h, E);
        AssembledHamiltonian Hh = H0;
        Hh.matrix.diagonal() += h * U;
        Hh.h = h;
        cell.singular = !classify_cube(Hh, E, plan.params).ns;
        slots[t].push_back(cell);
      }
    }
  });

  StabilityReport report;
  report.L = L;
  report.h_star = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < energies.size(); ++e) {
    double baseline = 0.0;
    double best_h = 0.0;
    bool chain = true;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      StabilityRow row;
      row.E = energies[e];
      row.h = hs[k];
      std::size_t singular = 0;
      for (std::size_t t = 0; t < plan.trials; ++t) {
        const auto& cell = slots[t][e * hs.size() + k];
        singular += cell.singular;
        if (!cell.check.exists) {
          ++row.resonant;
        } else {
          row.max_drift = std::max(row.max_drift, cell.check.lhs);
          if (cell.check.rhs > 0.0) row.max_ratio = std::max(row.max_ratio, cell.check.lhs / cell.check.rhs);
          if (!cell.check.holds) ++row.violations;
        }
        report.trial_log.push_back({{"probe", "stability"}, {"L", L}, {"trial", t}, {"E", energies[e]}, {"h", hs[k]},
                                    {"drift", cell.check.lhs}, {"bound", cell.check.rhs},
                                    {"exists", cell.check.exists}, {"holds", cell.check.holds},
                                    {"singular", cell.singular}});
      }
      row.singular = EstimateReport::from_counts(singular, plan.trials);
      if (k == 0) baseline = std::max(row.singular.point_estimate, 1.0 / static_cast<double>(plan.trials));
      // Largest h of the leading run that stays within twice the h = 0 rate.
      if (chain && row.singular.point_estimate <= 2.0 * baseline)
        best_h = std::abs(hs[k]);
      else
        chain = false;
      report.violations += row.violations;
      report.rows.push_back(row);
    }
    report.h_star = std::min(report.h_star, best_h);
  }
  if (!std::isfinite(report.h_star)) report.h_star = 0.0;
  return report;
}

std::pair<Config, Config> default_separable_pair(int n, int d, int L, int N) {
  const Config x = Config::zeros(n, d);
  std::vector<int> coords(static_cast<std::size_t>(n * d), 0);
  for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i * d)] = 7 * N * L + 1;
  return {x, Config(d, coords)};
}

PairReport pair_singularity_probe(const TrialPlan& plan, int L, int k, const Config& x, const Config& y,
                                  double grid_step) {
  const auto verdict = is_separable(x, y, L, plan.params.N);
  if (!verdict.separable)
    throw PreconditionError("cubes at " + x.to_string() + " and " + y.to_string() + " are not separable");
  if (!(grid_step > 0.0)) throw ParameterError("grid step must be > 0");
  const MultiParticleCube cx(x, L), cy(y, L);
  PairReport report;
  report.L = L;
  report.k = k;
  report.x = x;
  report.y = y;
  report.threshold = 2.0 * cover_parameters(L, plan.params.p_k(k), plan.params.N, x.d()).a;
  const Interval I = plan.spectrum_bounds(cx);
  std::vector<double> grid;
  for (double E = I.lo; E <= I.hi + 1e-12; E = I.lo + static_cast<double>(grid.size()) * grid_step) grid.push_back(E);
  report.grid_points = grid.size();
  const SiteBox box = box_union(box_for(cx), box_for(cy));

  std::vector<std::optional<double>> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const auto realization = plan.sample(box, t);
    const auto fx = boundary_green_profile(diagonalize(assemble(cx, realization, plan.interaction)), grid);
    const auto fy = boundary_green_profile(diagonalize(assemble(cy, realization, plan.interaction)), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::min(fx[i], fy[i]) >= report.threshold) {
        slots[t] = grid[i];
        return;
      }
    }
  });
  std::size_t hits = 0;
  for (std::size_t t = 0; t < plan.trials; ++t) {
    hits += slots[t].has_value();
    nlohmann::json j{{"probe", "pair"}, {"L", L}, {"trial", t}, {"both_singular", slots[t].has_value()}};
    j["E"] = slots[t] ? nlohmann::json(*slots[t]) : nlohmann::json(nullptr);
    report.trial_log.push_back(std::move(j));
  }
  report.both_singular = EstimateReport::from_counts(hits, plan.trials);
  return report;
}

}  // namespace mploc
