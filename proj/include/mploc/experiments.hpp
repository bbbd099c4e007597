#pragma once

// Monte Carlo probes. Trial t draws its disorder from split_seed(master, t);
// per-trial results land in slots indexed by t and are reduced in trial
// order, so reports do not depend on the worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mploc/lattice.hpp"
#include "mploc/model.hpp"
#include "mploc/msa.hpp"
#include "mploc/spectral.hpp"
#include "mploc/stats.hpp"

namespace mploc {

struct TrialPlan {
  std::size_t trials = 100;
  std::uint64_t master_seed = 0;
  MsaParams params;
  DisorderSpec disorder;
  InteractionSpec interaction;
  std::vector<double> energies;  // empty -> five equispaced interior energies of I
  unsigned workers = 0;          // 0 -> hardware concurrency

  DisorderRealization sample(const SiteBox& box, std::size_t trial) const;
  // Spectrum interval of the model for n particles on the given cube.
  Interval spectrum_bounds(const MultiParticleCube& cube) const;
  std::vector<double> energy_list(const MultiParticleCube& cube) const;
};

struct EstimateReport {
  double point_estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  std::size_t trials = 0;
  std::size_t successes = 0;

  static EstimateReport from_counts(std::size_t successes, std::size_t trials);
};

// --- Combes-Thomas ----------------------------------------------------------

struct CtTrial {
  std::size_t trial = 0;
  int L = 0;
  double E = 0.0;
  double eta = 0.0;
  double max_ratio = 0.0;
};

struct CtReport {
  int n = 1;
  std::vector<CtTrial> trials;
  double max_ratio = 0.0;
  std::size_t violations = 0;
};

// Trial t uses side scales[t % scales.size()] and E = lambda_j + delta with
// j and delta in (0, 1] drawn from the trial seed.
CtReport combes_thomas_probe(const TrialPlan& plan, const std::vector<int>& scales);

// --- Wegner -----------------------------------------------------------------

struct WegnerScale {
  int L = 0;
  double E = 0.0;
  double threshold = 0.0;
  EstimateReport resonant;
  std::optional<EstimateReport> not_cnr;
};

struct WegnerFit {
  double E = 0.0;
  std::string quantity;  // "resonant" or "not_cnr"
  LineFit fit;           // log P against sqrt(L)
  bool decreasing = false;  // CI entirely below zero
};

struct WegnerOptions {
  std::vector<int> scales{8, 16, 32};
  // Replaces exp(-L^{1/2}) as the resonance width when set.
  std::optional<double> resonance_width;
  bool with_cnr = false;
  int cnr_stride = 1;
  // Separable pair of cubes; resonant when dist(spec x, spec y) <= 2 exp(-L^{1/2}).
  bool pair = false;
};

struct WegnerReport {
  std::vector<WegnerScale> scales;
  std::vector<WegnerFit> fits;
  std::vector<nlohmann::json> trial_log;
};

WegnerReport wegner_probe(const TrialPlan& plan, const WegnerOptions& options);

// P(|V - (E - 2dn)| <= width) for a single site, from the disorder CDF.
double single_site_resonance_probability(const DisorderSpec& spec, double E, double width, int d = 1);

// --- initial scale ----------------------------------------------------------

// min(1/(2^N 12 N d), 2^{-N-1} mu_tilde).
double initial_mass(int N, int d, double mu_tilde);

struct InitialScaleRow {
  double E = 0.0;
  EstimateReport singular;
};

struct InitialScaleReport {
  int L0 = 0;
  double h = 0.0;
  double m_star = 0.0;
  double target = 0.0;      // L0^{-2 p 4^{N-n}}
  bool falsifiable = false;  // target >= 3 / trials
  std::vector<InitialScaleRow> rows;
  std::vector<nlohmann::json> trial_log;
};

InitialScaleReport initial_scale_probe(const TrialPlan& plan, int L0, double h, double mu_tilde);

// --- weak interaction -------------------------------------------------------

struct SecondResolvent {
  double lhs = 0.0;  // ||G0 - Gh||
  double rhs = 0.0;  // |h| ||U|| ||G0|| ||Gh||
  bool exists = true;  // both resolvents defined
  bool holds = true;
};

// Operator-norm check of the second resolvent identity bound for a
// symmetric H0 and diagonal interaction U.
SecondResolvent second_resolvent_check(const Eigen::MatrixXd& H0, const Eigen::VectorXd& U, double h, double E);

struct StabilityRow {
  double E = 0.0;
  double h = 0.0;
  EstimateReport singular;
  double max_drift = 0.0;
  double max_ratio = 0.0;  // lhs / rhs over trials with rhs > 0
  std::size_t violations = 0;
  std::size_t resonant = 0;  // trials where a resolvent did not exist
};

struct StabilityReport {
  int L = 0;
  std::vector<StabilityRow> rows;  // h = 0 first
  double h_star = 0.0;
  std::size_t violations = 0;
  std::vector<nlohmann::json> trial_log;
};

// Coupled sampling: every h in the list sees the same disorder. h = 0 is
// added when absent.
StabilityReport weak_interaction_stability(const TrialPlan& plan, const std::vector<double>& h_list, int L);

// --- pair singularity -------------------------------------------------------

struct PairReport {
  int L = 0;
  int k = 0;
  double threshold = 0.0;  // 2 a(L)
  Config x;
  Config y;
  std::size_t grid_points = 0;
  EstimateReport both_singular;
  std::vector<nlohmann::json> trial_log;
};

// Throws PreconditionError when the cubes at x, y are not separable.
PairReport pair_singularity_probe(const TrialPlan& plan, int L, int k, const Config& x, const Config& y,
                                  double grid_step);
// A separable pair with x at the origin and y shifted along the first axis.
std::pair<Config, Config> default_separable_pair(int n, int d, int L, int N);

// --- correlator decay -------------------------------------------------------

struct CorrelatorPoint {
  int r = 0;
  double mean = 0.0;
  double variance = 0.0;  // of the per-trial values
  double log_mean = 0.0;
};

struct CorrelatorReport {
  int L = 0;
  Interval I;
  std::vector<CorrelatorPoint> curve;
  LineFit fit;  // log E[Upsilon] against r
  double mu_tilde = 0.0;
  double mu_ci_lo = 0.0;
  double mu_ci_hi = 0.0;
  bool localized = false;  // CI above zero and R^2 >= 0.9
};

// One-particle chain C_L(0) in d = 1. E[Upsilon(x, x + r)] averages over
// all pairs inside the chain; distances run r = 2, 4, ... while the mean
// stays above 1e-12.
CorrelatorReport correlator_decay_probe(const TrialPlan& plan, int L, const std::optional<Interval>& I);

// --- eigenfunction decay ----------------------------------------------------

struct EigenProfile {
  std::size_t index = 0;
  double eigenvalue = 0.0;
  Config center;
  std::vector<double> profile;  // r -> max_{|x - center| = r} |psi(x)|
  double exp_rate = 0.0;
  double exp_sse = 0.0;
  double logpow_a = 0.0;
  double logpow_c = 0.0;
  double logpow_sse = 0.0;
  std::string better_fit;  // "exponential" or "log-power"
  bool localized = false;
};

std::vector<EigenProfile> eigenfunction_decay_probe(const SpectralData& spec, const Interval& I);

// --- dynamical localization -------------------------------------------------

// sum_{x in cube} sum_{y in K} |x|^s Upsilon(x, y, I)^2 with |x| the max norm.
double dynamical_moment(const SpectralData& spec, const std::vector<Config>& K, const Interval& I, double s);

struct DynamicalRow {
  int L = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> relative_change;  // against the previous scale
};

struct DynamicalReport {
  double s = 0.0;
  Interval I;
  std::vector<DynamicalRow> rows;
  std::vector<nlohmann::json> trial_log;
};

// K = {center of the cube}; cubes C_L(0) for each L.
DynamicalReport dynamical_probe(const TrialPlan& plan, const std::vector<int>& scales, double s,
                                const std::optional<Interval>& I);

// --- recursion --------------------------------------------------------------

struct RecursionProbeRow {
  double E = 0.0;
  RecursionRecord record;
  EstimateReport P_k;  // largest over the probed centers
  Config P_k_center;
  EstimateReport Q_next;
  EstimateReport S_next;
  EstimateReport P_next;
  double rhs_at_upper = 0.0;  // rhs from the upper confidence limits
  bool holds_at_ci = false;   // lower limit of P_next <= rhs_at_upper
};

struct RecursionProbeReport {
  RecursionLedger ledger;
  std::vector<RecursionProbeRow> rows;
  std::vector<nlohmann::json> trial_log;
};

// For k = 0..scales-2, estimates Q_{k+1}, S_{k+1}, P_{k+1} for the cube at
// the origin and P_k as the largest estimate over small cubes whose last
// particle sits at offsets 0, L_k and 2 L_k + 2. S scans the PI subcubes of
// side L_k on a stride.
RecursionProbeReport recursion_probe(const TrialPlan& plan, int scales, int stride = 1);

struct CnrNsSurrogate {
  int L_k = 0;
  int L_next = 0;
  std::size_t eligible = 0;  // CNR and M_PI + M_FI <= J
  EstimateReport ns_failure;
};

CnrNsSurrogate cnr_ns_surrogate(const TrialPlan& plan, int L_k, int L_next, double E, int stride = 1);

// --- interval cover ---------------------------------------------------------

struct CoverReport {
  int L = 0;
  int k = 0;
  CoverParameters params;
  bool condition_holds = false;
  double condition_bound = 0.0;
  double grid_step = 0.0;
  std::size_t grid_points = 0;
  std::size_t bad_points = 0;
  std::size_t uncovered_points = 0;
  std::vector<nlohmann::json> trial_log;
};

// grid_step <= 0 selects b / 4.
CoverReport cover_probe(const TrialPlan& plan, int L, int k, double grid_step);

}  // namespace mploc
