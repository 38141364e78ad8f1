#include "tacf/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "tacf/parallel.hpp"

namespace tacf {

SimilarityModel::SimilarityModel(std::vector<std::vector<SimilarityEntry>> rows,
                                 std::vector<std::uint32_t> user_counts)
    : rows_(std::move(rows)), user_counts_(std::move(user_counts)), square_sums_(rows_.size(), 0.0) {
  if (user_counts_.size() != rows_.size()) {
    throw std::invalid_argument("similarity model: row and user-count sizes differ");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double sum = 0.0;
    for (const auto& e : rows_[i]) sum += e.value * e.value;
    square_sums_[i] = sum;
  }
}

std::size_t SimilarityModel::stored_entries() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

void SimilarityModel::check(ItemIndex i) const {
  if (i >= rows_.size()) {
    throw std::out_of_range("item index " + std::to_string(i) + " outside similarity model of " +
                            std::to_string(rows_.size()) + " items");
  }
}

std::span<const SimilarityEntry> SimilarityModel::row(ItemIndex i) const {
  check(i);
  return rows_[i];
}

double SimilarityModel::similarity(ItemIndex i, ItemIndex j) const {
  check(i);
  check(j);
  const auto& r = rows_[i];
  const auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const SimilarityEntry& e, ItemIndex key) { return e.item < key; });
  return (it != r.end() && it->item == j) ? it->value : 0.0;
}

std::uint32_t SimilarityModel::user_count(ItemIndex i) const {
  check(i);
  return user_counts_[i];
}

double SimilarityModel::row_square_sum(ItemIndex i) const {
  check(i);
  return square_sums_[i];
}

std::span<const SimilarityEntry> similarity_row(const SimilarityModel& model, ItemIndex i) { return model.row(i); }

namespace {

std::vector<std::uint32_t> count_users(const TrainSet& train) {
  std::vector<std::uint32_t> counts(train.item_count, 0);
  for (const auto& profile : train.profiles) {
    for (const auto& r : profile) ++counts.at(r.item);
  }
  return counts;
}

double cosine(std::uint32_t common, std::uint32_t n_i, std::uint32_t n_j) {
  return static_cast<double>(common) / std::sqrt(static_cast<double>(n_i) * static_cast<double>(n_j));
}

}  // namespace

SimilarityModel build_similarity(const TrainSet& train, int threads) {
  const std::size_t items = train.item_count;
  const auto counts = count_users(train);

  // item -> users who rated it
  std::vector<std::size_t> offsets(items + 1, 0);
  for (std::size_t i = 0; i < items; ++i) offsets[i + 1] = offsets[i] + counts[i];
  std::vector<UserIndex> raters(offsets.back());
  {
    auto cursor = offsets;
    for (UserIndex u = 0; u < train.profiles.size(); ++u) {
      for (const auto& r : train.profiles[u]) raters[cursor[r.item]++] = u;
    }
  }

  std::vector<std::vector<SimilarityEntry>> rows(items);
  const auto n_items = static_cast<std::int64_t>(items);

#pragma omp parallel num_threads(resolve_threads(threads))
  {
    std::vector<std::uint32_t> common(items, 0);
    std::vector<ItemIndex> touched;

#pragma omp for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < n_items; ++ii) {
      const auto i = static_cast<ItemIndex>(ii);
      touched.clear();
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        for (const auto& r : train.profiles[raters[k]]) {
          if (r.item == i) continue;
          if (common[r.item]++ == 0) touched.push_back(r.item);
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = rows[i];
      row.reserve(touched.size());
      for (const auto j : touched) {
        row.push_back({j, cosine(common[j], counts[i], counts[j])});
        common[j] = 0;
      }
    }
  }
  return SimilarityModel(std::move(rows), counts);
}

namespace serial {

SimilarityModel build_similarity(const TrainSet& train) {
  const auto counts = count_users(train);

  // (min item, max item) -> number of users who rated both
  std::unordered_map<std::uint64_t, std::uint32_t> pair_counts;
  for (const auto& profile : train.profiles) {
    for (std::size_t a = 0; a < profile.size(); ++a) {
      for (std::size_t b = a + 1; b < profile.size(); ++b) {
        const std::uint64_t lo = std::min(profile[a].item, profile[b].item);
        const std::uint64_t hi = std::max(profile[a].item, profile[b].item);
        ++pair_counts[(lo << 32) | hi];
      }
    }
  }

  std::vector<std::vector<SimilarityEntry>> rows(train.item_count);
  for (const auto& [key, common] : pair_counts) {
    const auto i = static_cast<ItemIndex>(key >> 32);
    const auto j = static_cast<ItemIndex>(key & 0xffffffffu);
    rows[i].push_back({j, cosine(common, counts[i], counts[j])});
    rows[j].push_back({i, cosine(common, counts[j], counts[i])});
  }
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.item < b.item; });
  }
  return SimilarityModel(std::move(rows), counts);
}

}  // namespace serial

}  // namespace tacf
