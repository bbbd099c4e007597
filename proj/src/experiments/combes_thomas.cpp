#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "mploc/errors.hpp"
#include "mploc/experiments.hpp"
#include "mploc/parallel.hpp"

namespace mploc {

CtReport combes_thomas_probe(const TrialPlan& plan, const std::vector<int>& scales) {
  if (scales.empty()) throw ParameterError("Combes-Thomas probe needs at least one scale");
  const int n = plan.params.n;
  const int d = plan.params.d;
  std::vector<CtTrial> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const int L = scales[t % scales.size()];
    const MultiParticleCube cube(Config::zeros(n, d), L);
    const auto realization = plan.sample(box_for(cube), t);
    const auto spec = diagonalize(assemble(cube, realization, plan.interaction));
    const auto dim = static_cast<std::size_t>(spec.eigenvalues.size());
    const auto j = std::min(dim - 1, static_cast<std::size_t>(detail::trial_uniform(realization.seed(), 1) * dim));
    const double delta = 1.0 - detail::trial_uniform(realization.seed(), 2);
    const double E = spec.eigenvalues(static_cast<Eigen::Index>(j)) + delta;
    CtTrial row{t, L, E, spec.distance_to_spectrum(E), 0.0};
    if (row.eta > kSpectrumTolerance) row.max_ratio = combes_thomas_check(spec, E, n * d).max_violation_ratio;
    slots[t] = row;
  });
  CtReport report;
  report.n = n;
  report.trials = std::move(slots);
  for (const auto& row : report.trials) {
    report.max_ratio = std::max(report.max_ratio, row.max_ratio);
    if (row.max_ratio > 1.0) ++report.violations;
  }
  return report;
}

}  // namespace mploc
