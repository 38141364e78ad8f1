#include "tacf/temporal.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "tacf/format.hpp"
#include "tacf/parallel.hpp"

namespace tacf {

Ratio compute_ssnr(const SimilarityModel& model, ItemIndex item, ItemIndex probe) {
  if (item == probe) throw std::invalid_argument("ssnr of the probe item against itself");
  const double signal = model.similarity(item, probe);
  const double numerator = signal * signal;
  const double total = model.row_square_sum(item);

  // The cached sum minus the signal term loses precision when the signal
  // dominates the row; fall back to summing the noise terms directly.
  double noise = 0.0;
  if (numerator <= 0.5 * total) {
    noise = total - numerator;
  } else {
    for (const auto& e : model.row(item)) {
      if (e.item != probe) noise += e.value * e.value;
    }
  }

  if (noise == 0.0) return {numerator > 0.0 ? RatioKind::DegenerateInfinite : RatioKind::Isolated, 0.0};
  return {RatioKind::Finite, numerator / noise};
}

namespace {

struct UserSamples {
  std::vector<SsnrSample> samples;
  std::size_t degenerate_infinite = 0;
  std::size_t isolated = 0;
};

void collect_user(const TrainSet& train, const Probe& probe, const SimilarityModel& model, UserSamples& out) {
  for (const auto& r : train.profiles.at(probe.user)) {
    const auto ratio = compute_ssnr(model, r.item, probe.item);
    switch (ratio.kind) {
      case RatioKind::Finite:
        out.samples.push_back({probe.user, r.item, probe.time - r.time, ratio.value});
        break;
      case RatioKind::DegenerateInfinite:
        ++out.degenerate_infinite;
        break;
      default:
        ++out.isolated;
        break;
    }
  }
}

SsnrCollection merge(std::vector<UserSamples>& parts) {
  SsnrCollection out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.samples.size();
  out.samples.reserve(total);
  for (auto& p : parts) {
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    out.degenerate_infinite += p.degenerate_infinite;
    out.isolated += p.isolated;
  }
  return out;
}

}  // namespace

SsnrCollection collect_ssnr_ages(const TrainSet& train, const ProbeSet& probes, const SimilarityModel& model,
                                 int threads) {
  std::vector<UserSamples> parts(probes.probes.size());
  const auto n = static_cast<std::int64_t>(parts.size());
  FirstError errors;
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_threads(threads))
  for (std::int64_t k = 0; k < n; ++k) {
    errors.capture([&] { collect_user(train, probes.probes[k], model, parts[k]); });
  }
  errors.rethrow();
  return merge(parts);
}

namespace serial {

SsnrCollection collect_ssnr_ages(const TrainSet& train, const ProbeSet& probes, const SimilarityModel& model) {
  std::vector<UserSamples> parts(probes.probes.size());
  for (std::size_t k = 0; k < parts.size(); ++k) collect_user(train, probes.probes[k], model, parts[k]);
  return merge(parts);
}

}  // namespace serial

double CurveBin::center() const { return std::sqrt(age_lo * age_hi); }

long bin_index(double age, double ratio, double age_min) {
  if (!(age >= age_min)) return 0;
  long k = static_cast<long>(std::floor(std::log(age / age_min) / std::log(ratio)));
  // Correct for rounding in the logarithms and in ratio^k: an age within 1e-12
  // (relative) of an edge belongs to the bin starting there, so exact powers
  // such as 1000 s at ratio 10^0.1 open their bin.
  const double snapped = age * (1.0 + 1e-12);
  while (age_min * std::pow(ratio, static_cast<double>(k + 1)) <= snapped) ++k;
  while (k > 0 && snapped < age_min * std::pow(ratio, static_cast<double>(k))) --k;
  return k;
}

BinnedCurve log_bin_average(std::span<const SsnrSample> samples, double ratio, double age_min) {
  if (!(ratio > 1.0) || !std::isfinite(ratio)) throw std::invalid_argument("bin ratio must be > 1");
  if (!(age_min >= 1.0) || !std::isfinite(age_min)) throw std::invalid_argument("age_min must be >= 1");

  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<long, Acc> bins;
  for (const auto& s : samples) {
    auto& acc = bins[bin_index(static_cast<double>(s.age), ratio, age_min)];
    acc.sum += s.ssnr;
    ++acc.count;
  }

  BinnedCurve curve;
  curve.bins.reserve(bins.size());
  for (const auto& [k, acc] : bins) {
    curve.bins.push_back({age_min * std::pow(ratio, static_cast<double>(k)),
                          age_min * std::pow(ratio, static_cast<double>(k + 1)),
                          acc.sum / static_cast<double>(acc.count), acc.count});
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const BinnedCurve& curve) {
  out << "age_lo,age_hi,mean_ssnr,count\n";
  for (const auto& b : curve.bins) {
    out << format_real(b.age_lo) << ',' << format_real(b.age_hi) << ',' << format_real(b.mean_ssnr) << ','
        << b.count << '\n';
  }
}

BinnedCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("curve CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "age_lo,age_hi,mean_ssnr,count") throw std::runtime_error("unexpected curve CSV header '" + line + "'");

  BinnedCurve curve;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    CurveBin b;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> b.age_lo >> c1 >> b.age_hi >> c2 >> b.mean_ssnr >> c3 >> b.count) || c1 != ',' || c2 != ',' ||
        c3 != ',' || !(fields >> std::ws).eof()) {
      throw std::runtime_error("malformed curve CSV line " + std::to_string(line_no));
    }
    curve.bins.push_back(b);
  }
  return curve;
}

Ratio compute_fsnr(std::span<const std::pair<ItemIndex, double>> scores, ItemIndex probe) {
  double signal = 0.0;
  double noise = 0.0;
  for (const auto& [item, f] : scores) {
    if (item == probe) {
      signal += f * f;
    } else {
      noise += f * f;
    }
  }
  if (noise == 0.0) return {signal > 0.0 ? RatioKind::DegenerateInfinite : RatioKind::Undefined, 0.0};
  return {RatioKind::Finite, signal / noise};
}

}  // namespace tacf
