#include "tacf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <random>

namespace tacf {

SynthConfig SynthConfig::without_temporal_signal() const {
  SynthConfig c = *this;
  c.drift_rate = 0.0;
  c.burst_strength = 0.0;
  return c;
}

namespace {

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
  }

  bool chance(double p) { return uniform() < p; }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  // Geometric on {1, 2, ...} with the given mean.
  std::size_t run_length(double mean) {
    const double stop = 1.0 / mean;
    std::size_t n = 1;
    while (!chance(stop)) ++n;
    return n;
  }

 private:
  std::mt19937_64 engine_;
};

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& what) { throw SynthConfigError("synthetic config: " + what); };
  if (c.users == 0 || c.items == 0 || c.events == 0) fail("users, items and events must be positive");
  if (c.topics == 0 || c.topics > c.items) fail("topics must be in [1, items]");
  if (c.cluster_size == 0) fail("cluster_size must be positive");
  for (const double p : {c.burst_strength, c.noise}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("burst_strength and noise must be in [0, 1]");
  }
  if (!(c.drift_rate >= 0.0) || !std::isfinite(c.drift_rate)) fail("drift_rate must be >= 0");
  if (!(c.mean_session_length >= 1.0)) fail("mean_session_length must be >= 1");
  if (!(c.mean_in_session_gap >= 0.0) || !(c.mean_session_gap >= 0.0)) fail("gaps must be >= 0");
  if (c.start_time < 0) fail("start_time must be >= 0");
  // The most active user gets 1.5x the mean event count.
  const double max_events = std::ceil(1.5 * static_cast<double>(c.events) / static_cast<double>(c.users));
  if (max_events > static_cast<double>(c.items)) fail("more events per user than distinct items in the catalog");
}

std::string padded(char prefix, std::size_t value, std::size_t total) {
  const std::size_t width = std::to_string(total > 0 ? total - 1 : 0).size();
  std::string digits = std::to_string(value);
  return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

RatingLog generate_synthetic(const SynthConfig& config) {
  validate(config);
  Random rng(config.seed);

  std::vector<std::string> item_names(config.items);
  for (std::size_t i = 0; i < config.items; ++i) item_names[i] = padded('i', i, config.items);

  // Topic t owns items [topic_begin[t], topic_begin[t + 1]).
  std::vector<std::size_t> topic_begin(config.topics + 1);
  for (std::size_t t = 0; t <= config.topics; ++t) topic_begin[t] = t * config.items / config.topics;

  const double mean_events = static_cast<double>(config.events) / static_cast<double>(config.users);
  const double no_switch = std::numeric_limits<double>::infinity();

  RatingLog log;
  log.reserve(config.events + config.events / 4);
  std::vector<char> owned(config.items, 0);
  std::vector<std::size_t> picked;

  for (std::size_t u = 0; u < config.users; ++u) {
    const std::string user = padded('u', u, config.users);
    const auto count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(mean_events * (0.5 + rng.uniform()))), 2,
        std::min<std::size_t>(config.items, static_cast<std::size_t>(std::ceil(1.5 * mean_events))));

    double now = static_cast<double>(config.start_time) + rng.uniform() * 180.0 * 86400.0;
    std::size_t topic = rng.below(config.topics);
    double next_switch = config.drift_rate > 0.0 ? now + rng.exponential(1.0 / config.drift_rate) : no_switch;

    auto pick_cluster = [&](std::size_t t) {
      const std::size_t size = topic_begin[t + 1] - topic_begin[t];
      const std::size_t clusters = (size + config.cluster_size - 1) / config.cluster_size;
      const std::size_t begin = topic_begin[t] + rng.below(clusters) * config.cluster_size;
      return std::pair{begin, std::min(begin + config.cluster_size, topic_begin[t + 1])};
    };

    auto draw = [&](std::size_t lo, std::size_t hi) -> std::ptrdiff_t {
      for (int attempt = 0; attempt < 16; ++attempt) {
        const std::size_t item = lo + rng.below(hi - lo);
        if (!owned[item]) return static_cast<std::ptrdiff_t>(item);
      }
      // Walk from a random start to the first free item in range.
      const std::size_t start = rng.below(hi - lo);
      for (std::size_t k = 0; k < hi - lo; ++k) {
        const std::size_t item = lo + (start + k) % (hi - lo);
        if (!owned[item]) return static_cast<std::ptrdiff_t>(item);
      }
      return -1;
    };

    std::size_t emitted = 0;
    while (emitted < count) {
      auto cluster = pick_cluster(topic);
      const std::size_t length = std::min(rng.run_length(config.mean_session_length), count - emitted);
      for (std::size_t e = 0; e < length; ++e) {
        if (now >= next_switch) {
          if (config.topics > 1) topic = (topic + 1 + rng.below(config.topics - 1)) % config.topics;
          next_switch = now + rng.exponential(1.0 / config.drift_rate);
          cluster = pick_cluster(topic);
        }
        std::ptrdiff_t item = -1;
        if (rng.chance(config.noise)) {
          item = draw(0, config.items);
        } else if (rng.chance(config.burst_strength)) {
          item = draw(cluster.first, cluster.second);
        }
        if (item < 0) item = draw(topic_begin[topic], topic_begin[topic + 1]);
        if (item < 0) item = draw(0, config.items);

        owned[static_cast<std::size_t>(item)] = 1;
        picked.push_back(static_cast<std::size_t>(item));
        log.push_back({user, item_names[static_cast<std::size_t>(item)], static_cast<Seconds>(std::floor(now))});
        ++emitted;
        now += std::max(1.0, std::round(rng.exponential(config.mean_in_session_gap)));
      }
      now += std::round(rng.exponential(config.mean_session_gap));
    }
    for (const auto item : picked) owned[item] = 0;
    picked.clear();
  }
  return log;
}

}  // namespace tacf
