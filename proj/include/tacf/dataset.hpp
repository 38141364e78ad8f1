#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "tacf/types.hpp"

namespace tacf {

// One implicit-feedback observation: `user` saved `item` at `timestamp`.
struct RatingEvent {
  std::string user;
  std::string item;
  Seconds timestamp = 0;

  friend bool operator==(const RatingEvent&, const RatingEvent&) = default;
};

using RatingLog = std::vector<RatingEvent>;

enum class Column { User, Item, Timestamp };

struct LogFormat {
  char delimiter = '\t';
  // Position of each field in a line; must be a permutation of the three columns.
  std::vector<Column> columns{Column::User, Column::Item, Column::Timestamp};

  /// Parses "user,item,timestamp" style column orders. Throws std::invalid_argument.
  static std::vector<Column> parse_columns(const std::string& text);
};

struct ParseResult {
  RatingLog events;
  std::size_t skipped = 0;
};

/// Reads a delimiter-separated event log. Malformed lines (wrong field count,
/// empty ids, non-integer or negative timestamps) are skipped and counted;
/// blank lines are ignored. Throws std::ios_base::failure if the stream goes bad.
ParseResult parse_events(std::istream& in, const LogFormat& format = {});

/// Opens and parses `path`. Throws std::runtime_error if it cannot be opened.
ParseResult parse_events_file(const std::string& path, const LogFormat& format = {});

void write_events(std::ostream& out, std::span<const RatingEvent> events, char delimiter = '\t');

struct Rating {
  ItemIndex item = 0;
  Seconds time = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

/// Per-user chronological profiles; ties in time are ordered by item index.
using Profiles = std::vector<std::vector<Rating>>;

struct DatasetStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t ratings = 0;
  double sparsity = 1.0;
};

// Indexed, preprocessed ratings. Users and items are numbered in byte-wise
// lexicographic order of their external ids, so indices are stable across runs.
struct Dataset {
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  Profiles profiles;

  std::size_t user_count() const { return user_ids.size(); }
  std::size_t item_count() const { return item_ids.size(); }
  std::size_t rating_count() const;
  DatasetStats stats() const;

  /// Index of an external user id, or -1 when unknown.
  std::ptrdiff_t find_user(const std::string& id) const;
  std::ptrdiff_t find_item(const std::string& id) const;
};

/// Collapses duplicate (user, item) pairs to their earliest timestamp, then
/// repeatedly drops items saved by fewer than two distinct users and users left
/// without ratings until nothing changes.
Dataset preprocess(std::span<const RatingEvent> log);

/// Turns a Dataset back into events (one per rating, user-major order).
RatingLog to_events(const Dataset& dataset);

// Training profiles share the Dataset's index spaces. Users without training
// ratings keep an empty profile.
struct TrainSet {
  std::size_t item_count = 0;
  Profiles profiles;

  std::size_t user_count() const { return profiles.size(); }
  std::size_t rating_count() const;
};

/// Every rating of the dataset, no hold-out. Used for serving recommendations.
TrainSet full_train_set(const Dataset& dataset);

struct Probe {
  UserIndex user = 0;
  ItemIndex item = 0;
  Seconds time = 0;

  friend bool operator==(const Probe&, const Probe&) = default;
};

struct ProbeSet {
  std::vector<Probe> probes;  // ascending user index
  std::vector<UserIndex> excluded;  // users with a single rating
};

struct Split {
  TrainSet train;
  ProbeSet probe;
};

/// Holds out each user's latest rating (last in (time, item) order) as the probe.
/// Users with one rating are listed as excluded and appear in neither set.
Split split_leave_latest(const Dataset& dataset);

}  // namespace tacf
