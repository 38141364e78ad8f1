#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacf/dataset.hpp"
#include "tacf/types.hpp"

namespace tacf {

struct SimilarityEntry {
  ItemIndex item = 0;
  double value = 0.0;

  friend bool operator==(const SimilarityEntry&, const SimilarityEntry&) = default;
};

// Sparse item-item cosine similarity over binary ratings. Row i holds s_ij for
// every j != i sharing at least one user with i, sorted by j. Zero entries are
// never stored.
class SimilarityModel {
 public:
  SimilarityModel() = default;

  /// Assembles a model from finished rows. Row sums of squares are computed
  /// here, in ascending column order.
  SimilarityModel(std::vector<std::vector<SimilarityEntry>> rows,
                  std::vector<std::uint32_t> user_counts);

  std::size_t item_count() const { return rows_.size(); }
  std::size_t stored_entries() const;

  /// Throws std::out_of_range for an unknown item.
  std::span<const SimilarityEntry> row(ItemIndex i) const;

  /// s_ij, or 0 when not stored. Throws std::out_of_range for unknown items.
  double similarity(ItemIndex i, ItemIndex j) const;

  /// Number of distinct training users who rated `i`.
  std::uint32_t user_count(ItemIndex i) const;

  /// Cached sum over j of s_ij^2.
  double row_square_sum(ItemIndex i) const;

  friend bool operator==(const SimilarityModel&, const SimilarityModel&) = default;

 private:
  void check(ItemIndex i) const;

  std::vector<std::vector<SimilarityEntry>> rows_;
  std::vector<std::uint32_t> user_counts_;
  std::vector<double> square_sums_;
};

/// OpenMP kernel: each thread gathers whole rows through an item -> users
/// inverted index, so no partial accumulators need merging.
SimilarityModel build_similarity(const TrainSet& train, int threads = 0);

/// Stored row of `i`; absent columns are exactly zero. Throws std::out_of_range.
std::span<const SimilarityEntry> similarity_row(const SimilarityModel& model, ItemIndex i);

namespace serial {

/// Reference implementation: accumulates co-rating counts over every pair of
/// items inside each user's profile.
SimilarityModel build_similarity(const TrainSet& train);

}  // namespace serial

// On-disk cache. Layout, all integers little-endian:
//   magic "TACFSIM\0" | u32 version | u64 dataset hash | u64 item count
//   per row: u32 index | u32 user count | u32 entry count | entries (u32 item, f64 value)
inline constexpr std::uint32_t kSimilarityCacheVersion = 1;

/// FNV-1a over the training profiles; identifies the data a cache was built from.
std::uint64_t train_set_hash(const TrainSet& train);

void save_similarity(const std::string& path, const SimilarityModel& model, std::uint64_t dataset_hash);

struct CacheMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Throws CacheMismatch when the stored hash differs from `expected_hash`, and
/// std::runtime_error on a malformed or truncated file.
SimilarityModel load_similarity(const std::string& path, std::uint64_t expected_hash);

}  // namespace tacf
