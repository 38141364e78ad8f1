#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tacf/dataset.hpp"

using namespace tacf;

namespace {

ParseResult parse(const std::string& text, const LogFormat& format = {}) {
  std::istringstream in(text);
  return parse_events(in, format);
}

Dataset from(const RatingLog& log) { return preprocess(log); }

}  // namespace

TEST(ParseEvents, SingleLine) {
  const auto r = parse("u1\tb7\t1100000000\n");
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0], (RatingEvent{"u1", "b7", 1100000000}));
  EXPECT_EQ(r.skipped, 0u);
}

TEST(ParseEvents, EmptyStream) {
  const auto r = parse("");
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.skipped, 0u);
}

TEST(ParseEvents, MalformedLinesAreSkippedAndCounted) {
  const auto r = parse("u1\ta\t1\nu2\ta\t2\nu9\tb2\tnotatime\nu3\tb\t3\n");
  EXPECT_EQ(r.events.size(), 3u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.events[2].user, "u3");
}

TEST(ParseEvents, FieldCountEmptyIdsAndNegativeTimes) {
  const auto r = parse("u1\ta\nu1\ta\t1\textra\n\ta\t5\nu1\ta\t-4\nu1\ta\t12x\nu1\ta\t7\r\n\n");
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].timestamp, 7);
  EXPECT_EQ(r.skipped, 5u);
}

TEST(ParseEvents, CustomDelimiterAndColumnOrder) {
  LogFormat f;
  f.delimiter = ',';
  f.columns = LogFormat::parse_columns("timestamp,item,user");
  const auto r = parse("42,book,alice\n", f);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0], (RatingEvent{"alice", "book", 42}));
  EXPECT_THROW(LogFormat::parse_columns("user,item"), std::invalid_argument);
  EXPECT_THROW(LogFormat::parse_columns("user,item,time"), std::invalid_argument);
  EXPECT_THROW(LogFormat::parse_columns("user,user,timestamp"), std::invalid_argument);
}

TEST(ParseEvents, MissingFileIsAnError) {
  EXPECT_THROW(parse_events_file("/nonexistent/events.tsv"), std::runtime_error);
}

TEST(Preprocess, SingleUserItemRemoved) {
  const auto ds = from({{"u1", "a", 1}, {"u2", "a", 2}, {"u1", "b", 3}});
  EXPECT_EQ(ds.user_count(), 2u);
  EXPECT_EQ(ds.item_count(), 1u);
  EXPECT_EQ(ds.rating_count(), 2u);
  EXPECT_EQ(ds.item_ids, (std::vector<std::string>{"a"}));
}

TEST(Preprocess, DuplicatesCollapseBeforeCounting) {
  const auto ds = from({{"u1", "a", 5}, {"u1", "a", 2}});
  EXPECT_EQ(ds.user_count(), 0u);
  EXPECT_EQ(ds.item_count(), 0u);
  EXPECT_EQ(ds.stats().sparsity, 1.0);
}

TEST(Preprocess, DuplicateKeepsEarliestTimestamp) {
  const auto ds = from({{"u1", "a", 9}, {"u2", "a", 4}, {"u1", "a", 3}});
  const auto u1 = ds.find_user("u1");
  ASSERT_GE(u1, 0);
  ASSERT_EQ(ds.profiles[u1].size(), 1u);
  EXPECT_EQ(ds.profiles[u1][0].time, 3);
}

TEST(Preprocess, ProfilesSortedWithItemTieBreak) {
  const auto ds = from({{"u1", "c", 5}, {"u1", "b", 5}, {"u1", "a", 9}, {"u2", "a", 1}, {"u2", "b", 1},
                        {"u2", "c", 1}});
  const auto& p = ds.profiles[ds.find_user("u1")];
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(ds.item_ids[p[0].item], "b");
  EXPECT_EQ(ds.item_ids[p[1].item], "c");
  EXPECT_EQ(ds.item_ids[p[2].item], "a");
}

TEST(Preprocess, StatsAndSparsity) {
  const auto ds = from({{"u1", "a", 1}, {"u2", "a", 2}, {"u1", "b", 3}, {"u3", "b", 3}});
  const auto s = ds.stats();
  EXPECT_EQ(s.users, 3u);
  EXPECT_EQ(s.items, 2u);
  EXPECT_EQ(s.ratings, 4u);
  EXPECT_DOUBLE_EQ(s.sparsity, 1.0 - 4.0 / 6.0);
}

TEST(Preprocess, CascadeEmptiesUserProfile) {
  // x and y are single-user items; removing them leaves u3 with nothing.
  const RatingLog log{{"u1", "a", 1}, {"u2", "a", 1}, {"u1", "b", 2}, {"u2", "b", 2}, {"u3", "x", 3},
                      {"u3", "y", 4}, {"u4", "c", 1}, {"u5", "c", 1}, {"u6", "c", 9}, {"u4", "z", 4}};
  const auto ds = from(log);
  EXPECT_EQ(ds.find_user("u3"), -1);
  EXPECT_EQ(ds.find_item("z"), -1);
  EXPECT_EQ(ds.user_count(), 5u);
  EXPECT_EQ(ds.item_count(), 3u);
}

TEST(Preprocess, MatchesRepeatedFilterOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto log = oracle::random_log(rng, 1 + rng() % 50, 2 + rng() % 8, 2 + rng() % 10);
    const auto ds = preprocess(log);
    const auto expected = oracle::brute_preprocess(log);
    oracle::Triples got;
    for (const auto& e : to_events(ds)) got.insert({e.user, e.item, e.timestamp});
    ASSERT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(Preprocess, InvariantsAndIdempotence) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ds = preprocess(oracle::random_log(rng, 60, 10, 12));
    std::vector<std::set<UserIndex>> users(ds.item_count());
    for (UserIndex u = 0; u < ds.user_count(); ++u) {
      const auto& p = ds.profiles[u];
      ASSERT_FALSE(p.empty());
      std::set<ItemIndex> seen;
      for (std::size_t k = 0; k < p.size(); ++k) {
        ASSERT_TRUE(seen.insert(p[k].item).second);
        users[p[k].item].insert(u);
        if (k > 0) {
          ASSERT_TRUE(p[k - 1].time < p[k].time || (p[k - 1].time == p[k].time && p[k - 1].item < p[k].item));
        }
      }
    }
    for (const auto& u : users) ASSERT_GE(u.size(), 2u);
    ASSERT_TRUE(std::is_sorted(ds.user_ids.begin(), ds.user_ids.end()));

    const auto again = preprocess(to_events(ds));
    ASSERT_EQ(again.user_ids, ds.user_ids);
    ASSERT_EQ(again.item_ids, ds.item_ids);
    ASSERT_EQ(again.profiles, ds.profiles);
  }
}

TEST(SplitLeaveLatest, LatestBecomesProbe) {
  const auto ds = from({{"u", "a", 1}, {"u", "b", 5}, {"u", "c", 9}, {"v", "a", 1}, {"v", "b", 1}, {"v", "c", 1}});
  const auto split = split_leave_latest(ds);
  const auto u = static_cast<UserIndex>(ds.find_user("u"));
  ASSERT_EQ(split.probe.probes.size(), 2u);
  const auto& probe = split.probe.probes[u];
  EXPECT_EQ(ds.item_ids[probe.item], "c");
  EXPECT_EQ(probe.time, 9);
  ASSERT_EQ(split.train.profiles[u].size(), 2u);
  EXPECT_EQ(ds.item_ids[split.train.profiles[u][0].item], "a");
  EXPECT_EQ(ds.item_ids[split.train.profiles[u][1].item], "b");
}

TEST(SplitLeaveLatest, SingleRatingUserExcluded) {
  const auto ds = from({{"u", "a", 1}, {"v", "a", 2}, {"v", "b", 3}, {"w", "b", 4}, {"w", "a", 5}});
  const auto split = split_leave_latest(ds);
  ASSERT_EQ(split.probe.excluded.size(), 1u);
  EXPECT_EQ(ds.user_ids[split.probe.excluded[0]], "u");
  EXPECT_TRUE(split.train.profiles[split.probe.excluded[0]].empty());
  EXPECT_EQ(split.probe.probes.size(), 2u);
}

TEST(SplitLeaveLatest, TimestampTieGoesToHigherItemIndex) {
  const auto ds = from({{"u", "a", 7}, {"u", "b", 7}, {"v", "a", 1}, {"v", "b", 2}});
  const auto split = split_leave_latest(ds);
  const auto u = static_cast<UserIndex>(ds.find_user("u"));
  EXPECT_EQ(ds.item_ids[split.probe.probes[u].item], "b");
  EXPECT_EQ(ds.item_ids[split.train.profiles[u][0].item], "a");
}

TEST(SplitLeaveLatest, PartitionProperties) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ds = preprocess(oracle::random_log(rng, 80, 12, 10));
    const auto split = split_leave_latest(ds);
    std::size_t excluded_ratings = 0;
    for (const auto u : split.probe.excluded) excluded_ratings += ds.profiles[u].size();
    ASSERT_EQ(split.train.rating_count() + split.probe.probes.size(), ds.rating_count() - excluded_ratings);
    for (const auto& p : split.probe.probes) {
      const auto& train = split.train.profiles[p.user];
      ASSERT_FALSE(train.empty());
      for (const auto& r : train) {
        ASSERT_NE(r.item, p.item);
        ASSERT_LE(r.time, p.time);
      }
    }
  }
}
