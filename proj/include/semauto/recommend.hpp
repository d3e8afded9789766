#ifndef SEMAUTO_RECOMMEND_HPP
#define SEMAUTO_RECOMMEND_HPP

#include <span>
#include <vector>

#include "semauto/dataset.hpp"
#include "semauto/feature_map.hpp"
#include "semauto/profile.hpp"

namespace semauto {

struct ScoredItem {
  ItemId item;
  Real score;
};

// Scores non-increasing; ties ordered by ascending item id.
struct RankedList {
  UserId user = 0;
  std::vector<ScoredItem> entries;
};

// Additive score: the sum of profile weights over the item's features;
// features absent from the profile contribute 0.
Real score_item(const FeatureProfile& profile, std::span<const FeatureId> item_features);

// Top n candidates by score. Candidates unknown to the feature map are
// ignored, not scored 0. The caller must already have excluded the user's
// training items.
RankedList recommend_top_n(const FeatureProfile& profile,
                           const std::vector<ItemId>& candidate_items,
                           const ItemFeatureMap& feature_map, std::size_t n);

// Every mapped item the user has not rated in the training set.
std::vector<ItemId> unrated_mapped_items(const ItemFeatureMap& feature_map,
                                         const InteractionDataset& train, UserId user);

}  // namespace semauto

#endif  // SEMAUTO_RECOMMEND_HPP
