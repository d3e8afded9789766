#ifndef SEMAUTO_PROFILE_HPP
#define SEMAUTO_PROFILE_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "semauto/autoencoder.hpp"
#include "semauto/feature_map.hpp"
#include "semauto/types.hpp"

namespace semauto {

enum class Provenance : std::uint8_t { trained, neighbor_estimated };

struct ProfileEntry {
  FeatureId feature;
  Real weight;  // in [0,1]
  Provenance provenance;
};

// Per-user semantic profile: feature -> weight in [0,1]. Entries are kept
// sorted by feature id; the Euclidean norm is cached for cosine queries.
class FeatureProfile {
 public:
  FeatureProfile() = default;
  FeatureProfile(UserId user, std::vector<ProfileEntry> entries);

  UserId user() const { return user_; }
  const std::vector<ProfileEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Real norm() const { return norm_; }

  const ProfileEntry* find(FeatureId f) const;
  bool has(FeatureId f) const { return find(f) != nullptr; }
  Real weight_or_zero(FeatureId f) const;

 private:
  UserId user_ = 0;
  std::vector<ProfileEntry> entries_;
  Real norm_ = 0;
};

// Min-max normalization of raw aggregated weights into [0,1]. When all raw
// weights are equal the profile degenerates to 0.5 everywhere. Empty raw
// input is an error: the user had no trainable features.
FeatureProfile build_profile(UserId user,
                             const std::vector<std::pair<FeatureId, Real>>& raw);

// Overload wiring the autoencoder aggregation directly.
FeatureProfile build_profile(const UserAutoencoder& net, const VectorX& raw_weights);

// Cosine over the union feature space with absent features as 0. Either
// vector all-zero gives 0.
Real cosine_similarity(const FeatureProfile& a, const FeatureProfile& b);

struct Neighbor {
  UserId user;
  Real similarity;
};

struct NeighborSet {
  UserId user = 0;
  std::vector<Neighbor> neighbors;  // similarity descending, ties by user id
};

// Immutable snapshot of all user profiles, looked up by user id.
class ProfileStore {
 public:
  void add(FeatureProfile profile);
  const FeatureProfile* find(UserId user) const;
  std::size_t size() const { return profiles_.size(); }
  std::vector<UserId> users() const;  // ascending
  const std::map<UserId, FeatureProfile>& all() const { return profiles_; }

 private:
  std::map<UserId, FeatureProfile> profiles_;
};

// The k most similar users to u (self excluded), ties broken by ascending
// user id. Fewer than k when the population is smaller.
NeighborSet top_k_neighbors(UserId user, const ProfileStore& all_profiles, std::size_t k);

// Adds neighbor-estimated weights for every feature present in at least one
// neighbor profile but absent from p: the sum of neighbor weights (absent
// treated as 0) divided by k. Trained entries are never modified. With
// divide_by_possessing_count the divisor is the number of neighbors that
// actually carry the feature instead of k.
FeatureProfile complete_profile(const FeatureProfile& p, const NeighborSet& neighbors,
                                const ProfileStore& neighbor_profiles, std::size_t k,
                                bool divide_by_possessing_count = false);

// Line-oriented persistence with a versioned header; weights are printed
// with enough digits to round-trip exactly.
void save_profiles(const ProfileStore& store, const ItemFeatureMap& vocab,
                   const std::string& path);
ProfileStore load_profiles(const std::string& path, const ItemFeatureMap& vocab);

}  // namespace semauto

#endif  // SEMAUTO_PROFILE_HPP
