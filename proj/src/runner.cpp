#include "mploc/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>

#include "mploc/errors.hpp"
#include "mploc/parallel.hpp"

namespace mploc {

bool ProbeOutput::passed() const {
  for (const auto& a : assertions)
    if (!a.passed) return false;
  return true;
}

TrialPlan make_plan(const RunConfig& c) {
  TrialPlan plan;
  plan.trials = c.probe.trials;
  plan.master_seed = c.master_seed;
  plan.params = c.params();
  plan.disorder = c.disorder;
  plan.disorder.master_seed = c.master_seed;
  plan.interaction = c.interaction;
  plan.energies = c.probe.energies;
  plan.workers = c.workers;
  return plan;
}

namespace {

using Row = std::vector<std::string>;
std::string num(double x) { return format_number(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

class Summary {
 public:
  Summary(const RunConfig& c, CsvTable& table) : c_(c), table_(table) { table_.header = summary_columns(); }

  void estimate(const std::string& probe, int L, double h, const std::string& energy, const EstimateReport& e) {
    add(probe, L, h, energy, num(e.point_estimate), num(e.ci_lo), num(e.ci_hi), e.trials);
  }
  void value(const std::string& probe, int L, double h, const std::string& energy, double v, std::size_t trials,
             std::optional<std::pair<double, double>> ci = std::nullopt) {
    add(probe, L, h, energy, num(v), ci ? num(ci->first) : "", ci ? num(ci->second) : "", trials);
  }

 private:
  void add(const std::string& probe, int L, double h, const std::string& energy, std::string est, std::string lo,
           std::string hi, std::size_t trials) {
    table_.rows.push_back({probe, num(L), num(c_.n), num(h), energy, std::move(est), std::move(lo), std::move(hi),
                           num(trials), std::to_string(c_.master_seed)});
  }
  const RunConfig& c_;
  CsvTable& table_;
};

std::string grid_label(const Interval& I, double step) {
  return "grid[" + num(I.lo) + ":" + num(I.hi) + ":" + num(step) + "]";
}

std::vector<int> scales_or(const RunConfig& c, std::vector<int> fallback) {
  return c.probe.scales.empty() ? fallback : c.probe.scales;
}

}  // namespace

ProbeOutput run_probe(const RunConfig& c) {
  c.validate();
  const TrialPlan plan = make_plan(c);
  const double h = c.interaction.h;
  ProbeOutput out;
  Summary summary(c, out.summary);
  const std::string& name = c.probe.name;

  if (name == "ct-check") {
    const auto rep = combes_thomas_probe(plan, scales_or(c, {2, 4, 6}));
    CsvTable t{{"trial", "L", "E", "eta", "max_ratio"}, {}};
    for (const auto& r : rep.trials) {
      t.rows.push_back({num(r.trial), num(r.L), num(r.E), num(r.eta), num(r.max_ratio)});
      out.trial_log.push_back({{"probe", name}, {"trial", r.trial}, {"L", r.L}, {"E", r.E}, {"eta", r.eta},
                               {"max_ratio", r.max_ratio}});
    }
    int L_max = 0;
    for (const auto& r : rep.trials) L_max = std::max(L_max, r.L);
    summary.value("ct-check.max_violation_ratio", L_max, h, "eta<=1", rep.max_ratio, rep.trials.size());
    out.tables.emplace_back("ct_trials.csv", std::move(t));
    out.assertions.push_back({"combes-thomas", rep.violations == 0,
                              std::to_string(rep.violations) + " violations, max ratio " + num(rep.max_ratio)});
  } else if (name == "wegner") {
    WegnerOptions opt;
    opt.scales = scales_or(c, opt.scales);
    opt.resonance_width = c.probe.resonance_width;
    opt.with_cnr = c.probe.with_cnr;
    opt.cnr_stride = c.probe.stride;
    opt.pair = c.probe.pair;
    auto rep = wegner_probe(plan, opt);
    CsvTable t{{"L", "E", "threshold", "p_resonant", "resonant_lo", "resonant_hi", "p_not_cnr", "not_cnr_lo", "not_cnr_hi"}, {}};
    for (const auto& r : rep.scales) {
      const std::string E = opt.pair ? "pair" : num(r.E);
      summary.estimate(opt.pair ? "wegner.pair_resonant" : "wegner.resonant", r.L, h, E, r.resonant);
      if (r.not_cnr) summary.estimate("wegner.not_cnr", r.L, h, E, *r.not_cnr);
      t.rows.push_back({num(r.L), E, num(r.threshold), num(r.resonant.point_estimate), num(r.resonant.ci_lo),
                        num(r.resonant.ci_hi), r.not_cnr ? num(r.not_cnr->point_estimate) : "",
                        r.not_cnr ? num(r.not_cnr->ci_lo) : "", r.not_cnr ? num(r.not_cnr->ci_hi) : ""});
    }
    CsvTable f{{"E", "quantity", "slope", "ci_lo", "ci_hi", "r2", "decreasing"}, {}};
    for (const auto& fit : rep.fits) {
      f.rows.push_back({num(fit.E), fit.quantity, num(fit.fit.slope), num(fit.fit.ci_lo), num(fit.fit.ci_hi),
                        num(fit.fit.r2), fit.decreasing ? "true" : "false"});
      summary.value("wegner.slope_" + fit.quantity, 0, h, num(fit.E), fit.fit.slope, plan.trials,
                    std::pair{fit.fit.ci_lo, fit.fit.ci_hi});
    }
    out.tables.emplace_back("wegner_scales.csv", std::move(t));
    out.tables.emplace_back("wegner_fits.csv", std::move(f));
    out.trial_log = std::move(rep.trial_log);
  } else if (name == "initial") {
    const int L0 = c.probe.L.value_or(c.msa.L0);
    auto rep = initial_scale_probe(plan, L0, c.probe.h, c.probe.mu_tilde);
    for (const auto& r : rep.rows) summary.estimate("initial.singular", L0, rep.h, num(r.E), r.singular);
    summary.value("initial.m_star", L0, rep.h, "", rep.m_star, plan.trials);
    summary.value(rep.falsifiable ? "initial.target" : "initial.target_not_falsifiable", L0, rep.h, "", rep.target,
                  plan.trials);
    out.trial_log = std::move(rep.trial_log);
  } else if (name == "stability") {
    const int L = c.probe.L.value_or(3);
    auto rep = weak_interaction_stability(plan, c.probe.h_list, L);
    CsvTable t{{"E", "h", "p_singular", "ci_lo", "ci_hi", "max_drift", "max_ratio", "violations", "resonant"}, {}};
    for (const auto& r : rep.rows) {
      summary.estimate("stability.singular", L, r.h, num(r.E), r.singular);
      t.rows.push_back({num(r.E), num(r.h), num(r.singular.point_estimate), num(r.singular.ci_lo),
                        num(r.singular.ci_hi), num(r.max_drift), num(r.max_ratio), num(r.violations), num(r.resonant)});
    }
    summary.value("stability.h_star", L, h, "", rep.h_star, plan.trials);
    out.tables.emplace_back("stability.csv", std::move(t));
    out.assertions.push_back({"second-resolvent", rep.violations == 0, std::to_string(rep.violations) + " violations"});
    out.trial_log = std::move(rep.trial_log);
  } else if (name == "pair") {
    const int L = c.probe.L.value_or(c.msa.L0);
    const auto [x, y] = default_separable_pair(c.n, c.d, L, c.N);
    const double step = c.probe.grid_step > 0.0 ? c.probe.grid_step : 0.01;
    auto rep = pair_singularity_probe(plan, L, c.probe.k, x, y, step);
    summary.estimate("pair.both_singular", L, h, grid_label(plan.spectrum_bounds(MultiParticleCube(x, L)), step),
                     rep.both_singular);
    summary.value("pair.threshold", L, h, "", rep.threshold, plan.trials);
    out.trial_log = std::move(rep.trial_log);
  } else if (name == "correlator") {
    const int L = c.probe.L.value_or(50);
    const auto rep = correlator_decay_probe(plan, L, c.probe.interval);
    CsvTable t{{"r", "mean", "variance", "log_mean"}, {}};
    for (const auto& p : rep.curve) t.rows.push_back({num(p.r), num(p.mean), num(p.variance), num(p.log_mean)});
    const std::string I = "[" + num(rep.I.lo) + ":" + num(rep.I.hi) + "]";
    summary.value("correlator.mu_tilde", L, h, I, rep.mu_tilde, plan.trials, std::pair{rep.mu_ci_lo, rep.mu_ci_hi});
    summary.value("correlator.r2", L, h, I, rep.fit.r2, plan.trials);
    summary.value("correlator.localized", L, h, I, rep.localized ? 1.0 : 0.0, plan.trials);
    out.tables.emplace_back("correlator_curve.csv", std::move(t));
    for (const auto& p : rep.curve)
      out.trial_log.push_back({{"probe", name}, {"r", p.r}, {"mean", p.mean}, {"variance", p.variance}});
  } else if (name == "eigdecay") {
    const int L = c.probe.L.value_or(20);
    const MultiParticleCube cube(Config::zeros(c.n, c.d), L);
    const Interval I = c.probe.interval.value_or(plan.spectrum_bounds(cube));
    std::vector<std::vector<EigenProfile>> slots(plan.trials);
    parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
      slots[t] = eigenfunction_decay_probe(diagonalize(assemble(cube, plan.sample(box_for(cube), t), plan.interaction)), I);
    });
    std::size_t total = 0, localized = 0, logpow = 0;
    CsvTable fits{{"trial", "index", "eigenvalue", "exp_rate", "exp_sse", "logpow_a", "logpow_c", "logpow_sse", "better_fit", "localized"}, {}};
    CsvTable profiles{{"index", "r", "value"}, {}};
    for (std::size_t t = 0; t < plan.trials; ++t) {
      for (const auto& p : slots[t]) {
        ++total;
        localized += p.localized;
        logpow += p.better_fit == "log-power";
        fits.rows.push_back({num(t), num(p.index), num(p.eigenvalue), num(p.exp_rate), num(p.exp_sse), num(p.logpow_a),
                             num(p.logpow_c), num(p.logpow_sse), p.better_fit, p.localized ? "true" : "false"});
        if (t == 0)
          for (std::size_t r = 0; r < p.profile.size(); ++r) profiles.rows.push_back({num(p.index), num(r), num(p.profile[r])});
      }
      out.trial_log.push_back({{"probe", name}, {"trial", t}, {"eigenpairs", slots[t].size()}});
    }
    const std::string Is = "[" + num(I.lo) + ":" + num(I.hi) + "]";
    summary.estimate("eigdecay.localized_fraction", L, h, Is, EstimateReport::from_counts(localized, total));
    summary.estimate("eigdecay.logpow_preferred", L, h, Is, EstimateReport::from_counts(logpow, total));
    out.tables.emplace_back("eigen_fits.csv", std::move(fits));
    out.tables.emplace_back("eigen_profiles.csv", std::move(profiles));
  } else if (name == "dynloc") {
    auto rep = dynamical_probe(plan, scales_or(c, {30, 50}), c.probe.s, c.probe.interval);
    CsvTable t{{"L", "mean", "variance", "relative_change"}, {}};
    const std::string I = "[" + num(rep.I.lo) + ":" + num(rep.I.hi) + "]";
    for (const auto& r : rep.rows) {
      t.rows.push_back({num(r.L), num(r.mean), num(r.variance), r.relative_change ? num(*r.relative_change) : ""});
      const double se = std::sqrt(r.variance / static_cast<double>(plan.trials));
      summary.value("dynloc.moment", r.L, h, I, r.mean, plan.trials, std::pair{r.mean - 1.96 * se, r.mean + 1.96 * se});
      if (r.relative_change) summary.value("dynloc.relative_change", r.L, h, I, *r.relative_change, plan.trials);
    }
    out.tables.emplace_back("dynloc.csv", std::move(t));
    out.trial_log = std::move(rep.trial_log);
  } else if (name == "recursion") {
    const int scales = c.probe.scales.empty() ? 2 : c.probe.scales.front();
    auto rep = recursion_probe(plan, scales, c.probe.stride);
    CsvTable t{{"row", "k", "L_k", "L_next", "E", "P_k", "Q_next", "S_next", "P_next", "rhs", "rhs_at_upper", "holds_at_ci", "paper_target"}, {}};
    for (const auto& r : rep.rows) {
      const auto& rec = r.record;
      t.rows.push_back({"empirical", num(rec.k), num(rec.L_k), num(rec.L_next), num(r.E), num(rec.P_k), num(rec.Q_next),
                        num(rec.S_next), num(*rec.P_next), num(rec.rhs_bound), num(r.rhs_at_upper),
                        r.holds_at_ci ? "true" : "false", num(rec.paper_target)});
      summary.estimate("recursion.P_k", rec.L_k, h, num(r.E), r.P_k);
      out.trial_log.push_back({{"probe", name}, {"k", rec.k}, {"E", r.E}, {"P_k_center", r.P_k_center.to_string()}});
      summary.estimate("recursion.Q_next", rec.L_next, h, num(r.E), r.Q_next);
      summary.estimate("recursion.S_next", rec.L_next, h, num(r.E), r.S_next);
      summary.estimate("recursion.P_next", rec.L_next, h, num(r.E), r.P_next);
      summary.value("recursion.rhs_at_upper", rec.L_next, h, num(r.E), r.rhs_at_upper, plan.trials);
    }
    // Arithmetic reference row for the recursion formula.
    RecursionLedger arithmetic;
    const auto& a = recursion_step(arithmetic, 0, plan.params, {1e-3, 1e-5, 1e-5, std::nullopt});
    t.rows.push_back({"arithmetic", num(a.k), num(a.L_k), num(a.L_next), "", num(a.P_k), num(a.Q_next), num(a.S_next),
                      "", num(a.rhs_bound), "", "", num(a.paper_target)});
    if (c.probe.cnr_surrogate) {
      const double E = plan.energy_list(MultiParticleCube(Config::zeros(c.n, c.d), 2)).front();
      const auto s = cnr_ns_surrogate(plan, 2, 30, E, c.probe.stride);
      summary.estimate("recursion.cnr_ns_failure", s.L_next, h, num(E), s.ns_failure);
    }
    out.tables.emplace_back("ledger.csv", std::move(t));
    out.trial_log.insert(out.trial_log.end(), rep.trial_log.begin(), rep.trial_log.end());
  } else if (name == "cover") {
    const int L = c.probe.L.value_or(10);
    auto rep = cover_probe(plan, L, c.probe.k, c.probe.grid_step);
    const MultiParticleCube cube(Config::zeros(c.n, c.d), L);
    const std::string grid = grid_label(plan.spectrum_bounds(cube), rep.grid_step);
    summary.value("cover.uncovered_points", L, h, grid, static_cast<double>(rep.uncovered_points), plan.trials);
    summary.value("cover.bad_points", L, h, grid, static_cast<double>(rep.bad_points), plan.trials);
    summary.value("cover.condition_holds", L, h, grid, rep.condition_holds ? 1.0 : 0.0, plan.trials);
    CsvTable t{{"L", "k", "a", "b", "c", "condition_bound", "condition_holds", "grid_step", "grid_points", "bad_points", "uncovered_points"}, {}};
    t.rows.push_back({num(L), num(rep.k), num(rep.params.a), num(rep.params.b), num(rep.params.c), num(rep.condition_bound),
                      rep.condition_holds ? "true" : "false", num(rep.grid_step), num(rep.grid_points), num(rep.bad_points),
                      num(rep.uncovered_points)});
    out.tables.emplace_back("cover.csv", std::move(t));
    out.trial_log = std::move(rep.trial_log);
  }
  return out;
}

void write_run(const std::string& dir, const RunConfig& config, const ProbeOutput& output) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  write_text((root / "config.json").string(), config_to_json(config).dump(2) + "\n");
  write_jsonl((root / "trials.jsonl").string(), output.trial_log);
  write_csv((root / "summary.csv").string(), output.summary);
  for (const auto& [file, table] : output.tables) write_csv((root / file).string(), table);

  nlohmann::json assertions = nlohmann::json::array();
  for (const auto& a : output.assertions) assertions.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  const nlohmann::json meta{{"finished_at", stamp}, {"passed", output.passed()}, {"assertions", assertions}};
  write_text((root / "metadata.json").string(), meta.dump(2) + "\n");
}

}  // namespace mploc
