#include "mploc/stats.hpp"

#include <cmath>

#include "mploc/errors.hpp"

namespace mploc {

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (successes > trials) throw ParameterError("successes exceed trials");
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Keep the point estimate inside the interval despite rounding.
  w.lo = std::min(w.lo, p);
  w.hi = std::max(w.hi, p);
  return w;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> y_variance, double z) {
  const std::size_t n = x.size();
  if (n != y.size() || (!y_variance.empty() && y_variance.size() != n))
    throw DimensionError("fit inputs have different lengths");
  if (n < 2) throw ParameterError("a line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("a line fit needs at least two distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  double var = n > 2 ? sse / static_cast<double>(n - 2) / sxx : 0.0;
  if (!y_variance.empty()) {
    double propagated = 0.0;
    for (std::size_t i = 0; i < n; ++i) propagated += (x[i] - mx) * (x[i] - mx) * y_variance[i];
    var += propagated / (sxx * sxx);
  }
  f.slope_se = std::sqrt(var);
  f.ci_lo = f.slope - z * f.slope_se;
  f.ci_hi = f.slope + z * f.slope_se;
  return f;
}

MeanVar mean_variance(std::span<const double> values) {
  MeanVar out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    for (double v : values) out.variance += (v - out.mean) * (v - out.mean);
    out.variance /= static_cast<double>(values.size() - 1);
  }
  return out;
}

}  // namespace mploc
