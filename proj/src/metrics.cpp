#include "semauto/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "semauto/errors.hpp"

namespace semauto {

namespace {

Real gain(int stars) { return std::exp2(static_cast<Real>(stars)) - 1.0; }

int stars_or_zero(const std::unordered_map<ItemId, int>& test_stars, ItemId item) {
  auto it = test_stars.find(item);
  return it == test_stars.end() ? 0 : it->second;
}

}  // namespace

std::unordered_set<ItemId> relevant_test_items(const InteractionDataset& test, UserId user,
                                               int relevance_threshold) {
  std::unordered_set<ItemId> out;
  for (const Rating& r : test.ratings_of(user)) {
    if (r.stars >= relevance_threshold) out.insert(r.item);
  }
  return out;
}

std::unordered_map<ItemId, int> test_stars_of(const InteractionDataset& test, UserId user) {
  std::unordered_map<ItemId, int> out;
  for (const Rating& r : test.ratings_of(user)) out.emplace(r.item, r.stars);
  return out;
}

Real precision_at(const RankedList& list, const std::unordered_set<ItemId>& relevant,
                  std::size_t n) {
  if (n < 1) throw ContractViolation("N must be >= 1");
  std::size_t hits = 0;
  const std::size_t depth = std::min(n, list.entries.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.count(list.entries[i].item) != 0) ++hits;
  }
  return static_cast<Real>(hits) / static_cast<Real>(n);
}

Real recall_at(const RankedList& list, const std::unordered_set<ItemId>& relevant,
               std::size_t n) {
  if (n < 1) throw ContractViolation("N must be >= 1");
  if (relevant.empty()) {
    throw ContractViolation("recall is undefined for an empty relevant set");
  }
  std::size_t hits = 0;
  const std::size_t depth = std::min(n, list.entries.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.count(list.entries[i].item) != 0) ++hits;
  }
  return static_cast<Real>(hits) / static_cast<Real>(relevant.size());
}

Real f1_at(Real precision, Real recall) {
  if (precision + recall == 0) return 0;
  return 2.0 * precision * recall / (precision + recall);
}

Real ndcg_at(const RankedList& list, const std::unordered_map<ItemId, int>& test_stars,
             std::size_t n) {
  if (n < 1) throw ContractViolation("N must be >= 1");

  Real dcg = 0;
  const std::size_t depth = std::min(n, list.entries.size());
  for (std::size_t p = 0; p < depth; ++p) {
    dcg += gain(stars_or_zero(test_stars, list.entries[p].item)) /
           std::log2(static_cast<Real>(p) + 2.0);
  }

  std::vector<int> stars;
  stars.reserve(test_stars.size());
  for (const auto& [_, s] : test_stars) stars.push_back(s);
  std::sort(stars.begin(), stars.end(), std::greater<>());

  Real idcg = 0;
  const std::size_t ideal_depth = std::min(n, stars.size());
  for (std::size_t p = 0; p < ideal_depth; ++p) {
    idcg += gain(stars[p]) / std::log2(static_cast<Real>(p) + 2.0);
  }
  return idcg == 0 ? 0 : dcg / idcg;
}

TopicDistribution topic_distribution(const GenreMap& genres,
                                     const std::vector<ItemId>& items,
                                     const std::vector<std::string>& fallback_topics) {
  TopicDistribution dist;
  std::size_t total = 0;
  for (const ItemId item : items) {
    const auto* gs = genres.find(item);
    if (gs == nullptr) continue;
    for (const auto& g : *gs) {
      dist[g] += 1.0;
      ++total;
    }
  }
  if (total == 0) {
    if (fallback_topics.empty()) {
      throw ContractViolation("no genres among the items and no fallback topics");
    }
    const Real p = 1.0 / static_cast<Real>(fallback_topics.size());
    for (const auto& t : fallback_topics) dist[t] = p;
    return dist;
  }
  for (auto& [_, p] : dist) p /= static_cast<Real>(total);
  return dist;
}

Real err_cascade(const std::vector<Real>& relevances) {
  Real err = 0;
  Real not_stopped = 1.0;  // product of (1 - R_i) over earlier positions
  for (std::size_t r = 0; r < relevances.size(); ++r) {
    const Real relevance = relevances[r];
    if (!(relevance >= 0 && relevance <= 1)) {
      throw ContractViolation("relevance probabilities must be in [0,1]");
    }
    err += not_stopped * relevance / static_cast<Real>(r + 1);
    not_stopped *= 1.0 - relevance;
  }
  return err;
}

Real err_ia_at(const RankedList& list, const std::unordered_map<ItemId, int>& test_stars,
               const GenreMap& genres, const TopicDistribution& topic_dist, std::size_t n,
               std::size_t* missing_genre_count) {
  if (n < 1) throw ContractViolation("N must be >= 1");
  Real sum_p = 0;
  for (const auto& [_, p] : topic_dist) sum_p += p;
  if (std::abs(sum_p - 1.0) > 1e-9) {
    throw ContractViolation("topic distribution must sum to 1");
  }

  const std::size_t depth = std::min(n, list.entries.size());
  if (missing_genre_count != nullptr) {
    for (std::size_t i = 0; i < depth; ++i) {
      if (!genres.has(list.entries[i].item)) ++*missing_genre_count;
    }
  }

  Real total = 0;
  std::vector<Real> relevances(depth);
  for (const auto& [topic, p_topic] : topic_dist) {
    for (std::size_t r = 0; r < depth; ++r) {
      const ItemId item = list.entries[r].item;
      const auto* gs = genres.find(item);
      const bool has_topic =
          gs != nullptr && std::binary_search(gs->begin(), gs->end(), topic);
      relevances[r] =
          has_topic ? gain(stars_or_zero(test_stars, item)) / 32.0 : 0.0;  // 2^5
    }
    total += p_topic * err_cascade(relevances);
  }
  return total;
}

}  // namespace semauto
