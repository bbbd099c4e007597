#pragma once

#include <cstddef>
#include <span>

namespace mploc {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Ordinary least squares y ~ a + b x. The slope variance adds the residual
// variance to the variance propagated from per-point variances of y (pass
// an empty span when unknown). The interval is slope +- z * se.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> y_variance = {},
                 double z = 1.96);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
};

MeanVar mean_variance(std::span<const double> values);

}  // namespace mploc
