#include <doctest.h>

#include <cmath>
#include <vector>

#include "mploc/errors.hpp"
#include "mploc/stats.hpp"

using namespace mploc;

TEST_CASE("Wilson interval") {
  const auto zero = wilson_interval(0, 100);
  CHECK(zero.lo == doctest::Approx(0.0));
  CHECK(zero.hi == doctest::Approx(1.96 * 1.96 / (100 + 1.96 * 1.96)).epsilon(1e-9));
  const auto half = wilson_interval(50, 100);
  CHECK(half.lo == doctest::Approx(0.403830).epsilon(1e-5));
  CHECK(half.hi == doctest::Approx(0.596170).epsilon(1e-5));
  const auto all = wilson_interval(20, 20);
  CHECK(all.hi == doctest::Approx(1.0));
  for (std::size_t s = 0; s <= 30; ++s) {
    const auto w = wilson_interval(s, 30);
    const double p = static_cast<double>(s) / 30.0;
    CHECK(w.lo <= p);
    CHECK(w.hi >= p);
    CHECK(w.lo >= 0.0);
    CHECK(w.hi <= 1.0);
  }
  CHECK_THROWS(wilson_interval(3, 2));
}

TEST_CASE("line fit") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 - 2.0 * v);
  const auto exact = fit_line(x, y);
  CHECK(exact.slope == doctest::Approx(-2.0));
  CHECK(exact.intercept == doctest::Approx(3.0));
  CHECK(exact.r2 == doctest::Approx(1.0));
  CHECK(exact.slope_se == doctest::Approx(0.0).epsilon(1e-12));

  // Residual-only standard error against the textbook formula.
  const std::vector<double> noisy{1.1, 1.9, 3.2, 3.8, 5.3};
  const auto f = fit_line(x, noisy);
  double sxx = 0.0, sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - 3.0) * (x[i] - 3.0);
    const double r = noisy[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  CHECK(f.slope == doctest::Approx(1.03));
  CHECK(f.slope_se == doctest::Approx(std::sqrt(sse / 3.0 / sxx)));
  CHECK(f.ci_lo == doctest::Approx(f.slope - 1.96 * f.slope_se));
  CHECK(f.ci_hi == doctest::Approx(f.slope + 1.96 * f.slope_se));

  // Per-point variances add sum w_i^2 var_i with w_i = (x_i - xbar) / Sxx.
  const std::vector<double> var{0.1, 0.1, 0.1, 0.1, 0.1};
  const auto g = fit_line(x, y, var);
  CHECK(g.slope_se == doctest::Approx(std::sqrt(0.1 / sxx)));

  const std::vector<double> one{1.0};
  CHECK_THROWS(fit_line(one, one));
}

TEST_CASE("mean and variance") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto mv = mean_variance(v);
  CHECK(mv.mean == doctest::Approx(2.5));
  CHECK(mv.variance == doctest::Approx(5.0 / 3.0));
  const std::vector<double> single{7.0};
  CHECK(mean_variance(single).variance == 0.0);
}
