#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "tacf/dataset.hpp"
#include "tacf/decay.hpp"
#include "tacf/similarity.hpp"
#include "tacf/types.hpp"

namespace tacf {

using WeightFunction = std::function<double(Seconds age)>;

struct ScoredItem {
  ItemIndex item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Positive prediction scores for one user at one instant. Items from the
// user's own profile and items scoring zero are absent.
struct ScoreVector {
  UserIndex user = 0;
  Seconds now = 0;
  std::vector<ScoredItem> scores;  // ascending item index

  double score(ItemIndex item) const;
};

using RecommendationList = std::vector<ScoredItem>;

// Reusable dense accumulator for score_items; one per thread.
class Scorer {
 public:
  explicit Scorer(std::size_t item_count);

  /// f_j = sum over profile items i of weight(now - t_i) * s_ij.
  /// Throws std::out_of_range for an unknown user and std::domain_error if
  /// `now` precedes one of the user's ratings.
  ScoreVector score(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                    const WeightFunction& weight);
  ScoreVector score(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                    const DecaySpec& decay);

 private:
  template <typename Weight>
  ScoreVector score_impl(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                         Weight&& weight);

  std::vector<double> acc_;
  std::vector<ItemIndex> touched_;
  std::vector<char> seen_;
};

ScoreVector score_items(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                        const DecaySpec& decay);

/// Highest scores first, ties by ascending item index, at most `n` entries.
/// Throws std::invalid_argument for n == 0.
RecommendationList top_n(const ScoreVector& scores, std::size_t n);

/// Zero-based rank of `item` in the full ordering of `scores`, or -1 when it
/// is not a candidate.
std::ptrdiff_t rank_of(const ScoreVector& scores, ItemIndex item);

/// Strict "ranks ahead of" ordering used by top_n.
inline bool ranks_before(const ScoredItem& a, const ScoredItem& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.item < b.item;
}

}  // namespace tacf
