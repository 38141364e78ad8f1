#include <gtest/gtest.h>

#include <cmath>

#include "tacf/temporal.hpp"

using namespace tacf;

namespace {

double log_step(const std::vector<double>& grid) { return std::log10(grid[1] / grid[0]); }

// Bins of ratio 10^0.1 from 1 s to 1e9 s valued exactly by `trend` at their centres.
template <typename Trend>
BinnedCurve synthetic_curve(Trend trend) {
  BinnedCurve curve;
  const double ratio = std::pow(10.0, 0.1);
  for (int k = 0; k < 90; ++k) {
    CurveBin b{std::pow(ratio, k), std::pow(ratio, k + 1), 0.0, 10};
    b.mean_ssnr = trend(b.center());
    curve.bins.push_back(b);
  }
  return curve;
}

double piecewise_shape(double t, double ts, double tl, double ks, double kl, double c) {
  if (t < ts) return c * std::pow(t / ts, -ks);
  if (t < tl) return c;
  return c * std::pow(t / tl, -kl);
}

}  // namespace

TEST(GeometricGrid, EndpointsAndSpacing) {
  const auto g = geometric_grid(100, 1e5, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g.front(), 100.0);
  EXPECT_EQ(g.back(), 1e5);
  EXPECT_NEAR(g[1], 1000.0, 1e-9);
  EXPECT_EQ(geometric_grid(5, 5, 1), std::vector<double>{5});
  EXPECT_THROW(geometric_grid(0, 1, 3), std::invalid_argument);
}

TEST(FitTrend, RoundTripsReferenceShape) {
  const auto curve = synthetic_curve([](double t) { return piecewise_shape(t, 5e4, 1e6, 0.6, 0.3, 1.0); });
  BreakpointGrids grids;
  grids.short_end.push_back(5e4);
  grids.long_start.push_back(1e6);
  const auto fit = fit_piecewise_trend(curve, grids);
  EXPECT_LT(fit.residual, 1e-9);
  EXPECT_NEAR(fit.short_exponent, 0.6, 1e-9);
  EXPECT_NEAR(fit.long_exponent, 0.3, 1e-9);
  EXPECT_NEAR(fit.plateau, 1.0, 1e-9);
  const double step = log_step(BreakpointGrids{}.short_end);
  EXPECT_LE(std::fabs(std::log10(fit.short_end / 5e4)), step);
  EXPECT_LE(std::fabs(std::log10(fit.long_start / 1e6)), log_step(BreakpointGrids{}.long_start));
  EXPECT_LE(fit.short_end, fit.long_start);
}

TEST(FitTrend, ExactGridPicksTruth) {
  const auto curve = synthetic_curve([](double t) { return piecewise_shape(t, 1e4, 1e7, 0.4, 0.8, 0.02); });
  const BreakpointGrids grids{{1e2, 1e3, 1e4, 1e5}, {1e6, 1e7}};
  const auto fit = fit_piecewise_trend(curve, grids);
  EXPECT_EQ(fit.short_end, 1e4);
  EXPECT_EQ(fit.long_start, 1e7);
  EXPECT_NEAR(fit.short_exponent, 0.4, 1e-9);
  EXPECT_NEAR(fit.long_exponent, 0.8, 1e-9);
  EXPECT_NEAR(fit.plateau, 0.02, 1e-12);
  EXPECT_LT(fit.residual, 1e-9);

  const auto d = fit.to_decay();
  EXPECT_EQ(eval_decay(d, 100000), 1.0);
  EXPECT_NEAR(eval_decay(d, 1000), std::pow(0.1, -0.4), 1e-12);
}

TEST(FitTrend, FlatCurveHasNoDecay) {
  const auto curve = synthetic_curve([](double) { return 0.0125; });
  const auto fit = fit_piecewise_trend(curve);
  EXPECT_EQ(fit.short_exponent, 0.0);
  EXPECT_EQ(fit.long_exponent, 0.0);
  EXPECT_NEAR(fit.plateau, 0.0125, 1e-14);
  EXPECT_LT(fit.residual, 1e-20);
  // all candidates tie; the smallest breakpoints win
  EXPECT_EQ(fit.short_end, 100.0);
  EXPECT_EQ(fit.long_start, 5e5);
}

TEST(FitTrend, RisingSegmentsClampToZero) {
  const auto curve = synthetic_curve([](double t) { return t < 1e4 ? std::pow(t, 0.3) : 15.0; });
  const auto fit = fit_piecewise_trend(curve);
  EXPECT_EQ(fit.short_exponent, 0.0);
  EXPECT_GE(fit.long_exponent, 0.0);
}

TEST(FitTrend, FindsThreePhaseBoundaries) {
  const auto curve = synthetic_curve([](double t) { return piecewise_shape(t, 1e4, 1e6, 0.5, 0.5, 0.01); });
  const BreakpointGrids grids;
  const auto fit = fit_piecewise_trend(curve, grids);
  EXPECT_LE(std::fabs(std::log10(fit.short_end / 1e4)), log_step(grids.short_end) + 1e-12);
  EXPECT_LE(std::fabs(std::log10(fit.long_start / 1e6)), log_step(grids.long_start) + 1e-12);
  EXPECT_NEAR(fit.short_exponent, 0.5, 0.05);
  EXPECT_NEAR(fit.long_exponent, 0.5, 0.05);
}

TEST(FitTrend, InfeasibleCurveReportsFailure) {
  BinnedCurve curve;
  curve.bins = {{1, 2, 0.5, 1}, {2, 4, 0.4, 1}, {1e6, 2e6, 0.1, 1}};
  EXPECT_THROW(fit_piecewise_trend(curve), FitError);
  EXPECT_THROW(fit_piecewise_trend(BinnedCurve{}), FitError);
}

TEST(FitTrend, IgnoresNonPositiveBins) {
  auto curve = synthetic_curve([](double t) { return piecewise_shape(t, 1e4, 1e7, 0.4, 0.8, 0.02); });
  curve.bins[3].mean_ssnr = 0.0;
  const auto fit = fit_piecewise_trend(curve, BreakpointGrids{{1e4}, {1e7}});
  EXPECT_LT(fit.residual, 1e-9);
}
