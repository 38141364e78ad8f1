#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tacf/temporal.hpp"

namespace tacf {

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw std::invalid_argument("geometric grid needs 0 < lo <= hi, count >= 1");
  if (count == 1) return {lo};
  std::vector<double> points(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) points[k] = lo * std::exp(step * static_cast<double>(k));
  points.front() = lo;
  points.back() = hi;
  return points;
}

decay::Piecewise TrendFit::to_decay() const {
  return {short_end, long_start, short_exponent, long_exponent};
}

namespace {

struct Point {
  double x;  // log10 age
  double y;  // log10 ssnr
};

struct Line {
  double slope = 0.0;
  double residual = 0.0;
};

// Least squares over pts[begin, end) with slope clamped to <= 0.
Line fit_decay_line(const std::vector<Point>& pts, std::size_t begin, std::size_t end) {
  const double n = static_cast<double>(end - begin);
  double mx = 0.0, my = 0.0;
  for (auto k = begin; k < end; ++k) {
    mx += pts[k].x;
    my += pts[k].y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (auto k = begin; k < end; ++k) {
    sxx += (pts[k].x - mx) * (pts[k].x - mx);
    sxy += (pts[k].x - mx) * (pts[k].y - my);
  }
  Line line;
  line.slope = sxx > 0.0 ? std::min(sxy / sxx, 0.0) : 0.0;
  for (auto k = begin; k < end; ++k) {
    const double r = pts[k].y - (my + line.slope * (pts[k].x - mx));
    line.residual += r * r;
  }
  return line;
}

}  // namespace

TrendFit fit_piecewise_trend(const BinnedCurve& curve, const BreakpointGrids& grids) {
  std::vector<Point> pts;
  pts.reserve(curve.bins.size());
  for (const auto& b : curve.bins) {
    if (b.mean_ssnr > 0.0 && b.age_lo > 0.0) pts.push_back({std::log10(b.center()), std::log10(b.mean_ssnr)});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });

  auto short_grid = grids.short_end;
  auto long_grid = grids.long_start;
  std::sort(short_grid.begin(), short_grid.end());
  std::sort(long_grid.begin(), long_grid.end());

  // Index of the first point at or beyond log10(t).
  auto split_at = [&](double t) {
    const double lx = std::log10(t);
    return static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), lx, [](const Point& p, double v) { return p.x < v; }) - pts.begin());
  };

  bool found = false;
  TrendFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const double ts : short_grid) {
    if (!(ts > 0.0)) continue;
    const auto a = split_at(ts);
    if (a < 2) continue;
    const auto short_line = fit_decay_line(pts, 0, a);
    for (const double tl : long_grid) {
      if (tl < ts) continue;
      const auto b = split_at(tl);
      if (b < a + 2 || pts.size() < b + 2) continue;

      double level = 0.0;
      for (auto k = a; k < b; ++k) level += pts[k].y;
      level /= static_cast<double>(b - a);
      double plateau_residual = 0.0;
      for (auto k = a; k < b; ++k) plateau_residual += (pts[k].y - level) * (pts[k].y - level);

      const auto long_line = fit_decay_line(pts, b, pts.size());
      const double residual = short_line.residual + plateau_residual + long_line.residual;
      // Residuals within rounding noise count as ties, which keep the earlier candidate.
      if (!found || residual < best.residual - 1e-12 * (1.0 + best.residual)) {
        found = true;
        best = {ts, tl, -short_line.slope, -long_line.slope, std::pow(10.0, level), residual};
      }
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "no breakpoint candidate leaves two bins in every segment (" << pts.size() << " usable bins, "
        << short_grid.size() << " x " << long_grid.size() << " candidates)";
    throw FitError(msg.str());
  }
  // -0.0 from negating a zero slope
  best.short_exponent += 0.0;
  best.long_exponent += 0.0;
  return best;
}

}  // namespace tacf
