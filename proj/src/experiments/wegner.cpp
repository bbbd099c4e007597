#include <algorithm>
#include <cmath>

#include "mploc/errors.hpp"
#include "mploc/experiments.hpp"
#include "mploc/parallel.hpp"

namespace mploc {

double single_site_resonance_probability(const DisorderSpec& spec, double E, double width, int d) {
  const double shift = E - 2.0 * d;
  return spec.cdf(shift + width) - spec.cdf(shift - width);
}

namespace {

struct WegnerTrial {
  std::vector<double> eta;
  std::vector<char> resonant;
  std::vector<char> not_cnr;
};

std::optional<WegnerFit> fit_scales(const std::vector<WegnerScale>& rows, double E, bool cnr) {
  std::vector<double> x, y, var;
  for (const auto& row : rows) {
    if (row.E != E) continue;
    const EstimateReport& est = cnr ? *row.not_cnr : row.resonant;
    if (est.successes == 0) return std::nullopt;
    const double p = est.point_estimate;
    x.push_back(std::sqrt(static_cast<double>(row.L)));
    y.push_back(std::log(p));
    var.push_back((1.0 - p) / (static_cast<double>(est.trials) * p));
  }
  if (x.size() < 2) return std::nullopt;
  WegnerFit f;
  f.E = E;
  f.quantity = cnr ? "not_cnr" : "resonant";
  f.fit = fit_line(x, y, var);
  f.decreasing = f.fit.ci_hi < 0.0;
  return f;
}

}  // namespace

WegnerReport wegner_probe(const TrialPlan& plan, const WegnerOptions& options) {
  if (options.scales.empty()) throw ParameterError("Wegner probe needs at least one scale");
  if (options.pair && options.with_cnr) throw ParameterError("CNR scans are not available for the pair variant");
  const int n = plan.params.n;
  const int d = plan.params.d;
  WegnerReport report;
  std::vector<double> energies;
  for (int L : options.scales) {
    const MultiParticleCube cube(Config::zeros(n, d), L);
    check_site_cap(cube);
    std::optional<MultiParticleCube> partner;
    SiteBox box = box_for(cube);
    if (options.pair) {
      const auto [x, y] = default_separable_pair(n, d, L, plan.params.N);
      partner.emplace(y, L);
      box = box_union(box, box_for(*partner));
    }
    energies = plan.energy_list(cube);
    const double width = options.resonance_width.value_or(resonance_threshold(L, plan.params.resonance_exponent));

    std::vector<WegnerTrial> slots(plan.trials);
    parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
      const auto realization = plan.sample(box, t);
      const auto H = assemble(cube, realization, plan.interaction);
      const Eigen::VectorXd sigma = eigenvalues_only(H);
      WegnerTrial& out = slots[t];
      if (options.pair) {
        const Eigen::VectorXd other = eigenvalues_only(assemble(*partner, realization, plan.interaction));
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < other.size(); ++i) gap = std::min(gap, distance_to_spectrum(sigma, other(i)));
        out.eta.push_back(gap);
        out.resonant.push_back(gap <= 2.0 * width);
        return;
      }
      for (double E : energies) {
        const double eta = distance_to_spectrum(sigma, E);
        out.eta.push_back(eta);
        out.resonant.push_back(eta <= width);
        if (options.with_cnr)
          out.not_cnr.push_back(!is_cnr(cube, E, plan.params, realization, plan.interaction, options.cnr_stride).cnr);
      }
    });

    const std::size_t columns = options.pair ? 1 : energies.size();
    for (std::size_t e = 0; e < columns; ++e) {
      std::size_t res = 0, ncnr = 0;
      for (std::size_t t = 0; t < plan.trials; ++t) {
        res += slots[t].resonant[e];
        if (options.with_cnr) ncnr += slots[t].not_cnr[e];
        nlohmann::json j{{"probe", "wegner"}, {"L", L}, {"trial", t}, {"eta", slots[t].eta[e]},
                         {"resonant", static_cast<bool>(slots[t].resonant[e])}};
        if (!options.pair) j["E"] = energies[e];
        if (options.with_cnr) j["cnr"] = !slots[t].not_cnr[e];
        report.trial_log.push_back(std::move(j));
      }
      WegnerScale row;
      row.L = L;
      row.E = options.pair ? std::nan("") : energies[e];
      row.threshold = width;
      row.resonant = EstimateReport::from_counts(res, plan.trials);
      if (options.with_cnr) row.not_cnr = EstimateReport::from_counts(ncnr, plan.trials);
      report.scales.push_back(row);
    }
  }

  if (!options.pair) {
    for (double E : energies) {
      if (auto f = fit_scales(report.scales, E, false)) report.fits.push_back(*f);
      if (options.with_cnr)
        if (auto f = fit_scales(report.scales, E, true)) report.fits.push_back(*f);
    }
  }
  return report;
}

double initial_mass(int N, int d, double mu_tilde) {
  if (N < 1 || d < 1 || !(mu_tilde > 0.0)) throw ParameterError("initial mass needs N, d >= 1 and mu_tilde > 0");
  return std::min(1.0 / (std::pow(2.0, N) * 12.0 * N * d), std::pow(2.0, -N - 1) * mu_tilde);
}

InitialScaleReport initial_scale_probe(const TrialPlan& plan, int L0, double h, double mu_tilde) {
  InitialScaleReport report;
  report.L0 = L0;
  report.h = h;
  report.m_star = initial_mass(plan.params.N, plan.params.d, mu_tilde);
  MsaParams params = plan.params;
  params.m = report.m_star;
  InteractionSpec interaction = plan.interaction;
  interaction.h = h;
  report.target = std::pow(static_cast<double>(L0), -2.0 * params.p * std::pow(4.0, params.N - params.n));
  report.falsifiable = report.target * static_cast<double>(plan.trials) >= 3.0;

  const MultiParticleCube cube(Config::zeros(params.n, params.d), L0);
  TrialPlan local = plan;
  local.interaction = interaction;
  const auto energies = local.energy_list(cube);
  std::vector<std::vector<CubeVerdict>> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const auto H = assemble(cube, plan.sample(box_for(cube), t), interaction);
    for (double E : energies) slots[t].push_back(classify_cube(H, E, params));
  });
  for (std::size_t e = 0; e < energies.size(); ++e) {
    std::size_t singular = 0;
    for (std::size_t t = 0; t < plan.trials; ++t) {
      singular += !slots[t][e].ns;
      auto j = verdict_to_json(slots[t][e], cube, energies[e], params.m, h);
      j["probe"] = "initial";
      j["trial"] = t;
      report.trial_log.push_back(std::move(j));
    }
    report.rows.push_back({energies[e], EstimateReport::from_counts(singular, plan.trials)});
  }
  return report;
}

}  // namespace mploc
