#include <algorithm>
#include <cstdlib>

#include "tacf/evaluation.hpp"
#include "tacf/parallel.hpp"
#include "tacf/temporal.hpp"

namespace tacf {

std::vector<double> ParamRange::points() const { return geometric_grid(lo, hi, count); }

ParamGrid ParamGrid::defaults(const std::string& family, std::size_t points) {
  ParamGrid g;
  g.family = family == "exponential" ? "exp" : family == "ibcf" ? "constant" : family;
  if (g.family == "constant") {
  } else if (g.family == "window") {
    g.ranges = {{"Tw", 100.0, 1e8, points}};
  } else if (g.family == "logistic") {
    g.ranges = {{"Tg", 1.0, 1e8, points}, {"b", 5.0, 5.0, 1}};
  } else if (g.family == "exp") {
    g.ranges = {{"Te", 1.0, 1e8, points}};
  } else if (g.family == "outraday") {
    g.ranges = {{"Ko", 0.1, 2.0, points}};
  } else if (g.family == "piecewise") {
    g.ranges = {{"Ts", 100.0, 1e5, points}, {"Tl", 5e5, 5e7, points}, {"Ks", 0.1, 1.0, points}, {"Kl", 0.1, 1.0, points}};
  } else {
    throw std::invalid_argument("unknown decay family '" + family + "'");
  }
  return g;
}

namespace {

double parse_number(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw std::invalid_argument("grid parameter '" + key + "': invalid number '" + text + "'");
  }
  return v;
}

}  // namespace

void ParamGrid::override_range(const std::string& text) {
  const auto eq = text.find('=');
  const std::string key = text.substr(0, eq);
  const auto it = std::find_if(ranges.begin(), ranges.end(), [&](const ParamRange& r) { return r.name == key; });
  if (it == ranges.end()) throw std::invalid_argument("grid parameter '" + key + "' does not apply to " + family);
  if (eq == std::string::npos) throw std::invalid_argument("grid parameter '" + key + "' has no value");

  std::vector<std::string> parts;
  std::string rest = text.substr(eq + 1);
  for (std::size_t pos; (pos = rest.find(':')) != std::string::npos; rest.erase(0, pos + 1)) {
    parts.push_back(rest.substr(0, pos));
  }
  parts.push_back(rest);

  ParamRange r{key, 0.0, 0.0, 1};
  if (parts.size() == 1) {
    r.lo = r.hi = parse_number(key, parts[0]);
  } else if (parts.size() == 3) {
    r.lo = parse_number(key, parts[0]);
    r.hi = parse_number(key, parts[1]);
    const double count = parse_number(key, parts[2]);
    if (count < 1 || count != static_cast<double>(static_cast<std::size_t>(count))) {
      throw std::invalid_argument("grid parameter '" + key + "': count must be a positive integer");
    }
    r.count = static_cast<std::size_t>(count);
  } else {
    throw std::invalid_argument("grid parameter '" + key + "': expected value or lo:hi:count");
  }
  if (!(r.lo > 0.0) || r.hi < r.lo) throw std::invalid_argument("grid parameter '" + key + "': need 0 < lo <= hi");
  *it = r;
}

std::vector<DecaySpec> ParamGrid::enumerate() const {
  std::vector<std::vector<double>> axes;
  for (const auto& r : ranges) axes.push_back(r.points());

  auto value = [&](const std::vector<double>& point, const char* name) {
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      if (ranges[k].name == name) return point[k];
    }
    throw std::logic_error(std::string("grid lacks parameter ") + name);
  };

  std::vector<DecaySpec> specs;
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<double> point(axes.size());
  while (true) {
    for (std::size_t k = 0; k < axes.size(); ++k) point[k] = axes[k][idx[k]];
    if (family == "constant") {
      specs.emplace_back(decay::Constant{});
    } else if (family == "window") {
      specs.emplace_back(decay::Window{value(point, "Tw")});
    } else if (family == "logistic") {
      specs.emplace_back(decay::Logistic{value(point, "Tg"), value(point, "b")});
    } else if (family == "exp") {
      specs.emplace_back(decay::Exponential{value(point, "Te")});
    } else if (family == "outraday") {
      specs.emplace_back(decay::Outraday{value(point, "Ko")});
    } else if (family == "piecewise") {
      const decay::Piecewise p{value(point, "Ts"), value(point, "Tl"), value(point, "Ks"), value(point, "Kl")};
      if (p.short_end <= p.long_start) specs.emplace_back(p);
    } else {
      throw std::invalid_argument("unknown decay family '" + family + "'");
    }

    std::size_t k = axes.size();
    while (k > 0 && ++idx[k - 1] == axes[k - 1].size()) {
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return specs;
}

SweepResult grid_sweep(const EvalContext& context, std::span<const DecaySpec> points, std::size_t objective,
                       std::span<const std::size_t> depths, int threads) {
  if (points.empty()) throw std::invalid_argument("empty parameter grid");
  if (std::find(depths.begin(), depths.end(), objective) == depths.end()) {
    throw std::invalid_argument("objective depth " + std::to_string(objective) + " is not among evaluated depths");
  }
  for (const auto& p : points) validate(p);

  SweepResult result;
  result.objective = objective;
  result.rows.resize(points.size());
  if (context.split.probe.probes.empty()) throw EvalError("no evaluable users (every user has a single rating)");
  const auto n = static_cast<std::int64_t>(points.size());
  FirstError errors;
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (std::int64_t k = 0; k < n; ++k) {
    errors.capture([&] { result.rows[k] = {points[k], serial::evaluate(context, points[k], depths)}; });
  }
  errors.rethrow();

  for (std::size_t k = 1; k < result.rows.size(); ++k) {
    if (result.rows[k].report.at(objective).hits > result.rows[result.best].report.at(objective).hits) result.best = k;
  }
  return result;
}

}  // namespace tacf
