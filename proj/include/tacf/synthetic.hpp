#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "tacf/dataset.hpp"
#include "tacf/types.hpp"

namespace tacf {

// Generator of implicit-feedback logs with planted temporal structure.
//
// Items are split into topics and each topic into small clusters. A user holds
// one long-term topic at a time and switches topic as a Poisson process
// (`drift_rate` per second). Activity comes in sessions; a session locks on to
// one cluster of the current topic and each pick stays in that cluster with
// probability `burst_strength`, otherwise it is drawn from the whole topic.
// With probability `noise` a pick ignores topics entirely. Each user's last
// event is taken from the final session, so it reflects the latest preferences.
struct SynthConfig {
  std::size_t users = 500;
  std::size_t items = 1000;
  std::size_t events = 50000;
  std::size_t topics = 20;
  std::size_t cluster_size = 10;
  double drift_rate = 1.0 / (20.0 * 86400.0);  // topic switches per second
  double burst_strength = 0.8;
  double noise = 0.1;
  double mean_session_length = 5.0;     // events
  double mean_in_session_gap = 120.0;   // seconds
  double mean_session_gap = 4.0 * 86400.0;
  Seconds start_time = 1100000000;
  std::uint64_t seed = 1;

  /// Same sizes, no drift and no bursts: ratings carry no temporal signal.
  SynthConfig without_temporal_signal() const;
};

struct SynthConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Deterministic in `config`, seed included. Only the raw mt19937_64 stream is
/// used, never the implementation-defined standard distributions.
/// Throws SynthConfigError for empty sizes, more events per user than items,
/// or probabilities outside [0, 1].
RatingLog generate_synthetic(const SynthConfig& config);

}  // namespace tacf
