#include "tacf/recommender.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tacf {

double ScoreVector::score(ItemIndex item) const {
  const auto it = std::lower_bound(scores.begin(), scores.end(), item,
                                   [](const ScoredItem& s, ItemIndex key) { return s.item < key; });
  return (it != scores.end() && it->item == item) ? it->score : 0.0;
}

Scorer::Scorer(std::size_t item_count) : acc_(item_count, 0.0), seen_(item_count, 0) {}

template <typename Weight>
ScoreVector Scorer::score_impl(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                               Weight&& weight) {
  if (user >= train.profiles.size()) throw std::out_of_range("unknown user index " + std::to_string(user));
  if (acc_.size() < model.item_count()) {
    acc_.resize(model.item_count(), 0.0);
    seen_.resize(model.item_count(), 0);
  }
  const auto& profile = train.profiles[user];
  for (const auto& r : profile) {
    if (now < r.time) {
      throw std::domain_error("query time " + std::to_string(now) + " precedes a rating at " +
                              std::to_string(r.time));
    }
  }

  touched_.clear();
  for (const auto& r : profile) {
    const double w = weight(now - r.time);
    if (w == 0.0) continue;
    for (const auto& e : model.row(r.item)) {
      if (!seen_[e.item]) {
        seen_[e.item] = 1;
        touched_.push_back(e.item);
      }
      acc_[e.item] += w * e.value;
    }
  }
  // Rated items are never candidates.
  for (const auto& r : profile) {
    if (seen_[r.item]) acc_[r.item] = 0.0;
  }

  std::sort(touched_.begin(), touched_.end());
  ScoreVector out;
  out.user = user;
  out.now = now;
  out.scores.reserve(touched_.size());
  for (const auto j : touched_) {
    if (acc_[j] > 0.0) out.scores.push_back({j, acc_[j]});
    acc_[j] = 0.0;
    seen_[j] = 0;
  }
  return out;
}

ScoreVector Scorer::score(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                          const WeightFunction& weight) {
  return score_impl(train, model, user, now, weight);
}

ScoreVector Scorer::score(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                          const DecaySpec& decay) {
  return score_impl(train, model, user, now, [&decay](Seconds age) { return eval_decay(decay, age); });
}

ScoreVector score_items(const TrainSet& train, const SimilarityModel& model, UserIndex user, Seconds now,
                        const DecaySpec& decay) {
  Scorer scorer(model.item_count());
  return scorer.score(train, model, user, now, decay);
}

RecommendationList top_n(const ScoreVector& scores, std::size_t n) {
  if (n == 0) throw std::invalid_argument("top_n needs n >= 1");
  // Max-heap under ranks_before: the front is the weakest item kept so far.
  RecommendationList heap;
  heap.reserve(std::min(n, scores.scores.size()));
  for (const auto& s : scores.scores) {
    if (heap.size() < n) {
      heap.push_back(s);
      std::push_heap(heap.begin(), heap.end(), ranks_before);
    } else if (ranks_before(s, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), ranks_before);
      heap.back() = s;
      std::push_heap(heap.begin(), heap.end(), ranks_before);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), ranks_before);
  return heap;
}

std::ptrdiff_t rank_of(const ScoreVector& scores, ItemIndex item) {
  const double target = scores.score(item);
  if (target <= 0.0) return -1;
  const ScoredItem probe{item, target};
  std::ptrdiff_t rank = 0;
  for (const auto& s : scores.scores) {
    if (ranks_before(s, probe)) ++rank;
  }
  return rank;
}

}  // namespace tacf
