#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tacf/dataset.hpp"
#include "tacf/decay.hpp"
#include "tacf/similarity.hpp"
#include "tacf/types.hpp"

namespace tacf {

enum class RatioKind {
  Finite,
  DegenerateInfinite,  // zero denominator, positive numerator
  Isolated,            // zero denominator, zero numerator
  Undefined,           // all scores zero (fsnr only)
};

struct Ratio {
  RatioKind kind = RatioKind::Finite;
  double value = 0.0;  // meaningful only when kind == Finite

  bool finite() const { return kind == RatioKind::Finite; }
};

/// Similarity signal-to-noise ratio of rated item `item` against the probe:
///   s(item, probe)^2 / sum_{j != probe, j != item} s(item, j)^2
/// Throws std::invalid_argument if item == probe, std::out_of_range for unknown items.
Ratio compute_ssnr(const SimilarityModel& model, ItemIndex item, ItemIndex probe);

struct SsnrSample {
  UserIndex user = 0;
  ItemIndex item = 0;
  Seconds age = 0;
  double ssnr = 0.0;

  friend bool operator==(const SsnrSample&, const SsnrSample&) = default;
};

struct SsnrCollection {
  std::vector<SsnrSample> samples;  // user-major, then profile order
  std::size_t degenerate_infinite = 0;
  std::size_t isolated = 0;

  friend bool operator==(const SsnrCollection&, const SsnrCollection&) = default;
};

/// One (age, ssnr) sample per training rating of every evaluated user, with age
/// measured back from that user's probe. Degenerate ratios are tallied, not emitted.
SsnrCollection collect_ssnr_ages(const TrainSet& train, const ProbeSet& probes,
                                 const SimilarityModel& model, int threads = 0);

namespace serial {
SsnrCollection collect_ssnr_ages(const TrainSet& train, const ProbeSet& probes,
                                 const SimilarityModel& model);
}  // namespace serial

struct CurveBin {
  double age_lo = 0.0;
  double age_hi = 0.0;
  double mean_ssnr = 0.0;
  std::size_t count = 0;

  /// Geometric centre of the bin, the abscissa used for trend fitting.
  double center() const;
};

struct BinnedCurve {
  std::vector<CurveBin> bins;  // ascending, empty bins omitted
};

inline constexpr double kDefaultBinRatio = 1.2589254117941673;  // 10^0.1
inline constexpr double kDefaultAgeMin = 1.0;

/// Bin k covers [age_min * ratio^k, age_min * ratio^(k+1)); ages below age_min
/// land in bin 0. Bin value is the arithmetic mean of its samples.
/// Throws std::invalid_argument unless ratio > 1 and age_min >= 1.
BinnedCurve log_bin_average(std::span<const SsnrSample> samples, double ratio = kDefaultBinRatio,
                            double age_min = kDefaultAgeMin);

/// Bin index of `age` for the given geometry (ages below age_min give 0).
long bin_index(double age, double ratio, double age_min);

void write_curve_csv(std::ostream& out, const BinnedCurve& curve);
/// Reads the format written by write_curve_csv. Throws std::runtime_error.
BinnedCurve read_curve_csv(std::istream& in);

struct TrendFit {
  double short_end = 0.0;       // T_s, seconds
  double long_start = 0.0;      // T_l, seconds
  double short_exponent = 0.0;  // K_s
  double long_exponent = 0.0;   // K_l
  double plateau = 0.0;         // c, in ssnr units
  double residual = 0.0;        // sum of squared log10 residuals

  /// Piecewise decay with the plateau normalised to weight 1.
  decay::Piecewise to_decay() const;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// `count` points from lo to hi inclusive, evenly spaced in log.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

struct BreakpointGrids {
  std::vector<double> short_end = geometric_grid(100.0, 1e5, 20);
  std::vector<double> long_start = geometric_grid(5e5, 5e7, 20);
};

/// Exhaustive search over (T_s, T_l) candidates. Bins are placed at their
/// centre in log10-log10 space and split into short (< T_s), plateau, and long
/// (>= T_l) segments; each segment needs two bins. The plateau level is the mean
/// log value, each decay segment gets an ordinary least-squares line whose
/// slope is clamped to be non-positive. Minimum total squared residual wins,
/// ties going to the smaller T_s, then smaller T_l. Bins with a non-positive
/// mean are ignored. Throws FitError when no candidate is feasible.
TrendFit fit_piecewise_trend(const BinnedCurve& curve, const BreakpointGrids& grids = {});

/// Prediction-level signal-to-noise ratio: f(probe)^2 / sum_{k != probe} f(k)^2.
/// `scores` are (item, score) pairs; a missing probe counts as score 0.
Ratio compute_fsnr(std::span<const std::pair<ItemIndex, double>> scores, ItemIndex probe);

}  // namespace tacf
