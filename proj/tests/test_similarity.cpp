#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tacf/similarity.hpp"

using namespace tacf;

namespace {

// Items 0..n-1 rated by the listed users (user indices).
TrainSet from_item_users(std::size_t items, const std::vector<std::vector<UserIndex>>& raters) {
  TrainSet t;
  t.item_count = items;
  UserIndex max_user = 0;
  for (const auto& r : raters) {
    for (const auto u : r) max_user = std::max(max_user, u);
  }
  t.profiles.resize(max_user + 1);
  for (ItemIndex i = 0; i < raters.size(); ++i) {
    for (const auto u : raters[i]) t.profiles[u].push_back({i, static_cast<Seconds>(i)});
  }
  return t;
}

}  // namespace

TEST(BuildSimilarity, IdenticalUserSetsGiveOne) {
  const auto m = build_similarity(from_item_users(2, {{0, 1}, {0, 1}}));
  EXPECT_DOUBLE_EQ(m.similarity(0, 1), 1.0);
  EXPECT_EQ(m.user_count(0), 2u);
}

TEST(BuildSimilarity, DisjointUserSetsStoreNothing) {
  const auto m = build_similarity(from_item_users(2, {{0}, {1}}));
  EXPECT_EQ(m.similarity(0, 1), 0.0);
  EXPECT_TRUE(m.row(0).empty());
  EXPECT_TRUE(similarity_row(m, 1).empty());
  EXPECT_EQ(m.stored_entries(), 0u);
}

TEST(BuildSimilarity, PartialOverlap) {
  // i rated by {a, b}, j rated by {b, c, d}
  const auto m = build_similarity(from_item_users(2, {{0, 1}, {1, 2, 3}}));
  EXPECT_NEAR(m.similarity(0, 1), 1.0 / (std::sqrt(2.0) * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(m.similarity(0, 1), 0.408248290463863, 1e-12);
}

TEST(BuildSimilarity, UnknownItemIsDomainError) {
  const auto m = build_similarity(from_item_users(2, {{0, 1}, {0, 1}}));
  EXPECT_THROW(m.row(2), std::out_of_range);
  EXPECT_THROW(similarity_row(m, 7), std::out_of_range);
  EXPECT_THROW(m.similarity(0, 5), std::out_of_range);
}

TEST(BuildSimilarity, MatchesDenseCosineOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = oracle::random_train_set(rng);
    const auto m = build_similarity(t);
    const auto dense = oracle::dense_cosine(t);
    std::size_t nonzero_pairs = 0;
    for (ItemIndex i = 0; i < t.item_count; ++i) {
      for (ItemIndex j = 0; j < t.item_count; ++j) {
        ASSERT_NEAR(m.similarity(i, j), dense[i][j], 1e-12) << i << "," << j;
        if (dense[i][j] > 0) ++nonzero_pairs;
      }
      // Row holds exactly the co-rated partners.
      std::vector<ItemIndex> expected;
      for (ItemIndex j = 0; j < t.item_count; ++j) {
        if (dense[i][j] > 0) expected.push_back(j);
      }
      std::vector<ItemIndex> got;
      for (const auto& e : m.row(i)) got.push_back(e.item);
      ASSERT_EQ(got, expected);
    }
    ASSERT_EQ(m.stored_entries(), nonzero_pairs);
  }
}

TEST(BuildSimilarity, SymmetryRangeAndCachedSquares) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = oracle::random_train_set(rng, 15, 20, 0.5);
    const auto m = build_similarity(t);
    for (ItemIndex i = 0; i < m.item_count(); ++i) {
      double sum = 0.0;
      for (const auto& e : m.row(i)) {
        ASSERT_NE(e.item, i);
        ASSERT_GT(e.value, 0.0);
        ASSERT_LE(e.value, 1.0);
        ASSERT_EQ(e.value, m.similarity(e.item, i));
        sum += e.value * e.value;
      }
      ASSERT_NEAR(m.row_square_sum(i), sum, 1e-9 * std::max(1.0, sum));
    }
  }
}

TEST(BuildSimilarity, ParallelKernelEqualsSerialReference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = oracle::random_train_set(rng, 40, 60, 0.2);
    const auto serial = serial::build_similarity(t);
    for (int threads : {1, 2, 4}) ASSERT_EQ(build_similarity(t, threads), serial);
  }
}

TEST(SimilarityCache, RoundTripAndHashRefusal) {
  std::mt19937_64 rng(4);
  const auto t = oracle::random_train_set(rng, 15, 20, 0.4);
  const auto m = build_similarity(t);
  const auto path = (std::filesystem::temp_directory_path() / "tacf_test_cache.bin").string();
  const auto hash = train_set_hash(t);
  save_similarity(path, m, hash);
  EXPECT_EQ(load_similarity(path, hash), m);
  EXPECT_THROW(load_similarity(path, hash ^ 1u), CacheMismatch);

  // Fixed little-endian header.
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_GE(bytes.size(), 28u);
  EXPECT_EQ(bytes.substr(0, 8), std::string("TACFSIM\0", 8));
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), kSimilarityCacheVersion);
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), t.item_count);

  // Truncated file is rejected.
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 3));
  }
  EXPECT_THROW(load_similarity(path, hash), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(SimilarityCache, HashTracksTrainingData) {
  std::mt19937_64 rng(6);
  auto t = oracle::random_train_set(rng, 10, 10, 0.5);
  const auto h = train_set_hash(t);
  EXPECT_EQ(h, train_set_hash(t));
  for (auto& p : t.profiles) {
    if (!p.empty()) {
      p.back().time += 1;
      break;
    }
  }
  EXPECT_NE(h, train_set_hash(t));
}
