#ifndef SEMAUTO_METRICS_HPP
#define SEMAUTO_METRICS_HPP

#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semauto/dataset.hpp"
#include "semauto/recommend.hpp"

namespace semauto {

// TS_u+: the user's test items at or above the relevance threshold.
std::unordered_set<ItemId> relevant_test_items(const InteractionDataset& test, UserId user,
                                               int relevance_threshold);

// Test stars by item for one user (0 stars outside the map means "not in
// the test set" to the gain functions below).
std::unordered_map<ItemId, int> test_stars_of(const InteractionDataset& test, UserId user);

// |top-N intersect relevant| / N. The denominator stays N even when the
// list is shorter.
Real precision_at(const RankedList& list, const std::unordered_set<ItemId>& relevant,
                  std::size_t n);

// hits / |relevant|; the relevant set must be non-empty (callers skip such
// users and count them).
Real recall_at(const RankedList& list, const std::unordered_set<ItemId>& relevant,
               std::size_t n);

// Harmonic mean; 0 when p + r == 0.
Real f1_at(Real precision, Real recall);

// Gains are 2^stars - 1 with raw 1..5 test stars, 0 for items outside the
// user's test set; the ideal ranking comes from the test stars sorted
// descending, truncated at N. Returns 0 when the ideal gain is 0.
Real ndcg_at(const RankedList& list, const std::unordered_map<ItemId, int>& test_stars,
             std::size_t n);

// P(t) per topic; must sum to 1 within 1e-9.
using TopicDistribution = std::map<std::string, Real>;

// Expected reciprocal rank of one relevance sequence:
// sum over positions r of (1/r) * prod_{i<r}(1 - R_i) * R_r.
Real err_cascade(const std::vector<Real>& relevances);

// Genre frequency over the given items; uniform over fallback_topics when
// none of the items carries a genre.
TopicDistribution topic_distribution(const GenreMap& genres,
                                     const std::vector<ItemId>& items,
                                     const std::vector<std::string>& fallback_topics);

// Intent-aware expected reciprocal rank over positions 1..N with per-topic
// cascade R = (2^stars - 1) / 2^5 when the item carries the topic's genre.
// Items missing from the genre map contribute 0 to every topic and are
// counted through missing_genre_count.
Real err_ia_at(const RankedList& list, const std::unordered_map<ItemId, int>& test_stars,
               const GenreMap& genres, const TopicDistribution& topic_dist, std::size_t n,
               std::size_t* missing_genre_count = nullptr);

}  // namespace semauto

#endif  // SEMAUTO_METRICS_HPP
