#include <algorithm>
#include <cmath>

#include "mploc/errors.hpp"
#include "mploc/experiments.hpp"
#include "mploc/parallel.hpp"

namespace mploc {

namespace {

// |psi_j(x)| for the eigenpairs with eigenvalue in I.
Eigen::MatrixXd abs_vectors_in(const SpectralData& spec, const Interval& I) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j)
    if (I.contains(spec.eigenvalues(j))) cols.push_back(j);
  Eigen::MatrixXd A(spec.eigenvectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) A.col(static_cast<Eigen::Index>(c)) = spec.eigenvectors.col(cols[c]).cwiseAbs();
  return A;
}

int sup_norm(const Config& x) {
  int r = 0;
  for (int c : x.coords()) r = std::max(r, std::abs(c));
  return r;
}

}  // namespace

CorrelatorReport correlator_decay_probe(const TrialPlan& plan, int L, const std::optional<Interval>& I_opt) {
  if (plan.params.n != 1 || plan.params.d != 1) throw PreconditionError("correlator decay probe needs n = 1 and d = 1");
  if (L < 1) throw ParameterError("chain half-length must be >= 1");
  const MultiParticleCube cube(Config::zeros(1, 1), L);
  CorrelatorReport report;
  report.L = L;
  report.I = I_opt.value_or(plan.spectrum_bounds(cube));
  const int size = 2 * L + 1;
  std::vector<int> distances;
  for (int r = 2; r < size; r += 2) distances.push_back(r);

  // slots[t][i]: mean over x of Upsilon(x, x + r_i)
  std::vector<std::vector<double>> slots(plan.trials);
  parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
    const auto spec = diagonalize(assemble(cube, plan.sample(box_for(cube), t), plan.interaction));
    const Eigen::MatrixXd A = abs_vectors_in(spec, report.I);
    const Eigen::MatrixXd Y = A * A.transpose();
    auto& row = slots[t];
    for (int r : distances) {
      double sum = 0.0;
      for (int x = 0; x + r < size; ++x) sum += Y(x, x + r);
      row.push_back(sum / (size - r));
    }
  });

  std::vector<double> xs, ys, vars;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    std::vector<double> values(plan.trials);
    for (std::size_t t = 0; t < plan.trials; ++t) values[t] = slots[t][i];
    const auto mv = mean_variance(values);
    if (!(mv.mean >= 1e-12)) break;
    report.curve.push_back({distances[i], mv.mean, mv.variance, std::log(mv.mean)});
    xs.push_back(distances[i]);
    ys.push_back(std::log(mv.mean));
    vars.push_back(mv.variance / (static_cast<double>(plan.trials) * mv.mean * mv.mean));
  }
  if (xs.size() >= 2) {
    report.fit = fit_line(xs, ys, vars);
    report.mu_tilde = -report.fit.slope;
    report.mu_ci_lo = -report.fit.ci_hi;
    report.mu_ci_hi = -report.fit.ci_lo;
    report.localized = report.mu_ci_lo > 0.0 && report.fit.r2 >= 0.9;
  }
  return report;
}

std::vector<EigenProfile> eigenfunction_decay_probe(const SpectralData& spec, const Interval& I) {
  const auto sites = spec.cube.sites();
  std::vector<EigenProfile> out;
  for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j) {
    if (!I.contains(spec.eigenvalues(j))) continue;
    EigenProfile p;
    p.index = static_cast<std::size_t>(j);
    p.eigenvalue = spec.eigenvalues(j);
    Eigen::Index c = 0;
    spec.eigenvectors.col(j).cwiseAbs().maxCoeff(&c);
    p.center = sites[static_cast<std::size_t>(c)];
    for (std::size_t x = 0; x < sites.size(); ++x) {
      const auto r = static_cast<std::size_t>(sup_distance(sites[x], p.center));
      if (p.profile.size() <= r) p.profile.resize(r + 1, 0.0);
      p.profile[r] = std::max(p.profile[r], std::abs(spec.eigenvectors(static_cast<Eigen::Index>(x), j)));
    }

    // Fit log profile on r >= 1 above the rounding floor.
    std::vector<double> r_vals, logs;
    for (std::size_t r = 1; r < p.profile.size(); ++r) {
      if (p.profile[r] <= 1e-14) break;
      r_vals.push_back(static_cast<double>(r));
      logs.push_back(std::log(p.profile[r]));
    }
    p.better_fit = "exponential";
    if (r_vals.size() >= 3) {
      const auto sse = [&](const std::vector<double>& x, const LineFit& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(logs[i] - f.intercept - f.slope * x[i], 2);
        return s;
      };
      const auto ef = fit_line(r_vals, logs);
      p.exp_rate = -ef.slope;
      p.exp_sse = sse(r_vals, ef);
      p.logpow_sse = std::numeric_limits<double>::infinity();
      for (int step = 0; step <= 30; ++step) {
        const double cpow = 0.1 * step;
        std::vector<double> x(r_vals.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(std::log(r_vals[i]), 1.0 + cpow);
        const auto lf = fit_line(x, logs);
        const double s = sse(x, lf);
        if (s < p.logpow_sse) {
          p.logpow_sse = s;
          p.logpow_a = -lf.slope;
          p.logpow_c = cpow;
        }
      }
      if (p.logpow_sse < p.exp_sse) p.better_fit = "log-power";
      p.localized = p.exp_rate > 0.0 && ef.r2 >= 0.5 && p.profile.back() < 1e-3 * p.profile.front();
    } else {
      // Decays to the rounding floor within two shells.
      p.localized = p.profile.size() > 1 && p.profile.back() < 1e-3 * p.profile.front();
    }
    out.push_back(std::move(p));
  }
  return out;
}

double dynamical_moment(const SpectralData& spec, const std::vector<Config>& K, const Interval& I, double s) {
  std::vector<std::size_t> ks;
  for (const auto& y : K) {
    auto idx = spec.cube.index_of(y);
    if (!idx) throw RegionError("region site " + y.to_string() + " is outside " + spec.cube.to_string());
    ks.push_back(*idx);
  }
  const auto sites = spec.cube.sites();
  Eigen::VectorXd weight(static_cast<Eigen::Index>(sites.size()));
  for (std::size_t x = 0; x < sites.size(); ++x) weight(static_cast<Eigen::Index>(x)) = std::pow(sup_norm(sites[x]), s);
  const Eigen::MatrixXd A = abs_vectors_in(spec, I);
  double total = 0.0;
  for (std::size_t y : ks) {
    const Eigen::VectorXd ups = A * A.row(static_cast<Eigen::Index>(y)).transpose();
    total += weight.dot(ups.cwiseAbs2());
  }
  return total;
}

DynamicalReport dynamical_probe(const TrialPlan& plan, const std::vector<int>& scales, double s,
                                const std::optional<Interval>& I_opt) {
  if (scales.empty()) throw ParameterError("dynamical probe needs at least one scale");
  DynamicalReport report;
  report.s = s;
  const MultiParticleCube largest(Config::zeros(plan.params.n, plan.params.d), *std::max_element(scales.begin(), scales.end()));
  report.I = I_opt.value_or(plan.spectrum_bounds(largest));
  for (int L : scales) {
    const MultiParticleCube cube(Config::zeros(plan.params.n, plan.params.d), L);
    const std::vector<Config> K{cube.center()};
    std::vector<double> slots(plan.trials);
    parallel_for(plan.trials, plan.workers, [&](std::size_t t) {
      const auto spec = diagonalize(assemble(cube, plan.sample(box_for(cube), t), plan.interaction));
      slots[t] = dynamical_moment(spec, K, report.I, s);
    });
    for (std::size_t t = 0; t < plan.trials; ++t)
      report.trial_log.push_back({{"probe", "dynloc"}, {"L", L}, {"trial", t}, {"moment", slots[t]}});
    const auto mv = mean_variance(slots);
    DynamicalRow row{L, mv.mean, mv.variance, std::nullopt};
    if (!report.rows.empty() && report.rows.back().mean > 0.0)
      row.relative_change = std::abs(mv.mean - report.rows.back().mean) / report.rows.back().mean;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace mploc
