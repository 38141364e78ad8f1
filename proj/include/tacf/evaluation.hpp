#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacf/dataset.hpp"
#include "tacf/decay.hpp"
#include "tacf/similarity.hpp"

namespace tacf {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// H@N = (1/|U|) * sum_u h_u / N. Throws EvalError for an empty flag set and
/// std::invalid_argument for n == 0.
double hit_rate(std::span<const char> hits, std::size_t n);
double hit_rate(std::size_t hit_count, std::size_t users, std::size_t n);

struct DepthResult {
  std::size_t depth = 0;
  std::size_t hits = 0;
  std::size_t users = 0;
  double hit_rate = 0.0;        // hits / (users * depth)
  double normalized = 0.0;      // hits / users
};

struct EvalReport {
  DecaySpec decay;
  std::vector<DepthResult> depths;  // in requested order
  double wall_seconds = 0.0;

  /// Throws std::out_of_range if `depth` was not evaluated.
  const DepthResult& at(std::size_t depth) const;
};

// Leave-the-latest-out split plus one similarity model over the training part,
// shared by every evaluation and sweep point.
struct EvalContext {
  Split split;
  SimilarityModel model;

  static EvalContext build(const Dataset& dataset, int threads = 0);
};

/// Scores each evaluated user at their probe time, ranks, and records whether
/// the probe is within each requested depth. Parallel over users.
/// Throws EvalError when there are no evaluable users.
EvalReport evaluate(const EvalContext& context, const DecaySpec& decay, std::span<const std::size_t> depths,
                    int threads = 0);
EvalReport evaluate(const Dataset& dataset, const DecaySpec& decay, std::span<const std::size_t> depths,
                    int threads = 0);

/// Per-user probe ranks (-1 = not a candidate), indexed like context.split.probe.probes.
std::vector<std::ptrdiff_t> probe_ranks(const EvalContext& context, const DecaySpec& decay, int threads = 0);

namespace serial {
EvalReport evaluate(const EvalContext& context, const DecaySpec& decay, std::span<const std::size_t> depths);
}  // namespace serial

struct ParamRange {
  std::string name;  // Tw, Tg, b, Te, Ko, Ts, Tl, Ks, Kl
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  std::vector<double> points() const;  // geometric, inclusive
};

// Cartesian product of the ranges of one decay family.
struct ParamGrid {
  std::string family;
  std::vector<ParamRange> ranges;

  /// Default ranges for a family with `points` geometric points each.
  /// Throws std::invalid_argument for unknown families.
  static ParamGrid defaults(const std::string& family, std::size_t points = 10);

  /// Replaces one range from "Key=lo:hi:count". Throws std::invalid_argument
  /// naming the key when it does not belong to the family or is malformed.
  void override_range(const std::string& text);

  /// Every grid point in row-major order (last range fastest). Piecewise
  /// points with Ts > Tl are skipped.
  std::vector<DecaySpec> enumerate() const;
};

struct SweepRow {
  DecaySpec decay;
  EvalReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid order
  std::size_t best = 0;
  std::size_t objective = 10;

  const SweepRow& best_row() const { return rows.at(best); }
};

/// Evaluates every point (parallel over points) and picks the maximum H@objective,
/// earliest point on ties. `depths` must include `objective`.
SweepResult grid_sweep(const EvalContext& context, std::span<const DecaySpec> points, std::size_t objective,
                       std::span<const std::size_t> depths, int threads = 0);

}  // namespace tacf
