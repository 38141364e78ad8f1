#include "tacf/evaluation.hpp"

#include <algorithm>
#include <chrono>

#include "tacf/parallel.hpp"
#include "tacf/recommender.hpp"

namespace tacf {

double hit_rate(std::size_t hit_count, std::size_t users, std::size_t n) {
  if (n == 0) throw std::invalid_argument("hit rate depth must be >= 1");
  if (users == 0) throw EvalError("hit rate over zero users is undefined");
  return static_cast<double>(hit_count) / static_cast<double>(users) / static_cast<double>(n);
}

double hit_rate(std::span<const char> hits, std::size_t n) {
  const auto count = static_cast<std::size_t>(std::count_if(hits.begin(), hits.end(), [](char h) { return h != 0; }));
  return hit_rate(count, hits.size(), n);
}

const DepthResult& EvalReport::at(std::size_t depth) const {
  for (const auto& d : depths) {
    if (d.depth == depth) return d;
  }
  throw std::out_of_range("depth " + std::to_string(depth) + " not in report");
}

EvalContext EvalContext::build(const Dataset& dataset, int threads) {
  EvalContext context;
  context.split = split_leave_latest(dataset);
  context.model = build_similarity(context.split.train, threads);
  return context;
}

namespace {

void check_depths(std::span<const std::size_t> depths) {
  if (depths.empty()) throw std::invalid_argument("no evaluation depths requested");
  for (const auto d : depths) {
    if (d == 0) throw std::invalid_argument("evaluation depth must be >= 1");
  }
}

EvalReport summarize(const DecaySpec& decay, std::span<const std::ptrdiff_t> ranks, std::span<const std::size_t> depths,
                     double seconds) {
  if (ranks.empty()) throw EvalError("no evaluable users (every user has a single rating)");
  EvalReport report;
  report.decay = decay;
  report.wall_seconds = seconds;
  for (const auto depth : depths) {
    DepthResult r;
    r.depth = depth;
    r.users = ranks.size();
    r.hits = static_cast<std::size_t>(std::count_if(ranks.begin(), ranks.end(), [depth](std::ptrdiff_t rank) {
      return rank >= 0 && static_cast<std::size_t>(rank) < depth;
    }));
    r.hit_rate = hit_rate(r.hits, r.users, depth);
    r.normalized = static_cast<double>(r.hits) / static_cast<double>(r.users);
    report.depths.push_back(r);
  }
  return report;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::ptrdiff_t> serial_ranks(const EvalContext& context, const DecaySpec& decay) {
  const auto& probes = context.split.probe.probes;
  std::vector<std::ptrdiff_t> ranks(probes.size(), -1);
  Scorer scorer(context.model.item_count());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& p = probes[k];
    ranks[k] = rank_of(scorer.score(context.split.train, context.model, p.user, p.time, decay), p.item);
  }
  return ranks;
}

}  // namespace

std::vector<std::ptrdiff_t> probe_ranks(const EvalContext& context, const DecaySpec& decay, int threads) {
  const auto& probes = context.split.probe.probes;
  std::vector<std::ptrdiff_t> ranks(probes.size(), -1);
  const auto n = static_cast<std::int64_t>(probes.size());
  FirstError errors;
#pragma omp parallel num_threads(resolve_threads(threads))
  {
    Scorer scorer(context.model.item_count());
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t k = 0; k < n; ++k) {
      errors.capture([&] {
        const auto& p = probes[k];
        ranks[k] = rank_of(scorer.score(context.split.train, context.model, p.user, p.time, decay), p.item);
      });
    }
  }
  errors.rethrow();
  return ranks;
}

EvalReport evaluate(const EvalContext& context, const DecaySpec& decay, std::span<const std::size_t> depths,
                    int threads) {
  check_depths(depths);
  const auto start = std::chrono::steady_clock::now();
  const auto ranks = probe_ranks(context, decay, threads);
  return summarize(decay, ranks, depths, seconds_since(start));
}

EvalReport evaluate(const Dataset& dataset, const DecaySpec& decay, std::span<const std::size_t> depths,
                    int threads) {
  check_depths(depths);
  const auto start = std::chrono::steady_clock::now();
  const auto context = EvalContext::build(dataset, threads);
  const auto ranks = probe_ranks(context, decay, threads);
  return summarize(decay, ranks, depths, seconds_since(start));
}

namespace serial {

EvalReport evaluate(const EvalContext& context, const DecaySpec& decay, std::span<const std::size_t> depths) {
  check_depths(depths);
  const auto start = std::chrono::steady_clock::now();
  const auto ranks = serial_ranks(context, decay);
  return summarize(decay, ranks, depths, seconds_since(start));
}

}  // namespace serial

}  // namespace tacf
