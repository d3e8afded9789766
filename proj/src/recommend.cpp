#include "semauto/recommend.hpp"

#include <algorithm>

namespace semauto {

Real score_item(const FeatureProfile& profile, std::span<const FeatureId> item_features) {
  Real score = 0;
  for (const FeatureId f : item_features) score += profile.weight_or_zero(f);
  return score;
}

RankedList recommend_top_n(const FeatureProfile& profile,
                           const std::vector<ItemId>& candidate_items,
                           const ItemFeatureMap& feature_map, std::size_t n) {
  std::vector<ItemId> candidates = candidate_items;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  RankedList list;
  list.user = profile.user();
  list.entries.reserve(candidates.size());
  for (const ItemId item : candidates) {
    const auto* feats = feature_map.features_of(item);
    if (feats == nullptr) continue;  // unknown to the KG
    list.entries.push_back({item, score_item(profile, *feats)});
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const ScoredItem& a, const ScoredItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item < b.item;
            });
  if (list.entries.size() > n) list.entries.resize(n);
  return list;
}

std::vector<ItemId> unrated_mapped_items(const ItemFeatureMap& feature_map,
                                         const InteractionDataset& train, UserId user) {
  std::vector<ItemId> out;
  for (const ItemId item : feature_map.items()) {
    if (!train.contains(user, item)) out.push_back(item);
  }
  return out;
}

}  // namespace semauto
