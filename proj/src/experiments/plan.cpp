#include "mploc/errors.hpp"
#include "mploc/experiments.hpp"

namespace mploc {

DisorderRealization TrialPlan::sample(const SiteBox& box, std::size_t trial) const {
  DisorderSpec spec = disorder;
  spec.master_seed = master_seed;
  return DisorderRealization::sample(spec, box, trial);
}

Interval TrialPlan::spectrum_bounds(const MultiParticleCube& cube) const {
  const double U = interaction.h != 0.0 ? interaction_norm(cube, interaction) : 0.0;
  return spectrum_interval(cube.n(), cube.d(), disorder.support_bound, interaction.h, U);
}

std::vector<double> TrialPlan::energy_list(const MultiParticleCube& cube) const {
  if (!energies.empty()) return energies;
  const Interval I = spectrum_bounds(cube);
  std::vector<double> out;
  for (int i = 1; i <= 5; ++i) out.push_back(I.lo + I.width() * i / 6.0);
  return out;
}

EstimateReport EstimateReport::from_counts(std::size_t successes, std::size_t trials) {
  const auto w = wilson_interval(successes, trials);
  EstimateReport r;
  r.successes = successes;
  r.trials = trials;
  r.point_estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  r.ci_lo = w.lo;
  r.ci_hi = w.hi;
  return r;
}

}  // namespace mploc
