#ifndef SEMAUTO_AUTOENCODER_HPP
#define SEMAUTO_AUTOENCODER_HPP

#include <utility>
#include <vector>

#include "semauto/feature_map.hpp"
#include "semauto/types.hpp"

namespace semauto {

// Per-user 3-layer network shape: input/output units are the user's rated
// items known to the KG, hidden units are the union of their feature sets,
// and an edge (item, feature) exists iff the feature belongs to the item.
// Encoder and decoder edge sets are transposes; there are no bias nodes.
struct SparseTopology {
  std::vector<ItemId> items;        // m rated items, ascending
  std::vector<FeatureId> features;  // |S| = |union of C_i|, ascending
  // Encoder adjacency per item: indices into `features`, ascending.
  std::vector<std::vector<SpIndex>> item_features;
  std::size_t edge_count = 0;  // sum of |C_i|, per side

  Eigen::Index item_dim() const { return static_cast<Eigen::Index>(items.size()); }
  Eigen::Index feature_dim() const { return static_cast<Eigen::Index>(features.size()); }
};

struct TrainConfig {
  Real init_weight = 1e-3;     // constant, near zero; randomness would break reproducibility
  Real learning_rate = 0.1;
  int max_epochs = 5000;
  Real rmse_target = 1e-3;
  Real min_improvement = 1e-8;

  void validate() const;
};

enum class StopReason { target_reached, converged, max_epochs };

const char* to_string(StopReason r);

struct TrainTrace {
  int epochs_run = 0;  // gradient updates applied
  // RMSE evaluated before each update plus once at the stopping point, so
  // front() is the untrained error and back() the final one.
  std::vector<Real> rmse_per_epoch;
  StopReason stop_reason = StopReason::max_epochs;

  Real initial_rmse() const { return rmse_per_epoch.front(); }
  Real final_rmse() const { return rmse_per_epoch.back(); }
};

struct UserAutoencoder {
  UserId user = 0;
  SparseTopology topology;
  SparseMat encoder;  // |S| x m, entry (f, i) = w_if
  SparseMat decoder;  // m x |S|, entry (j, f) = v_fj (untied)
};

struct Activations {
  VectorX hidden;  // |S|
  VectorX output;  // m
};

// Gradient of the loss w.r.t. each edge weight, aligned with the matrices'
// compressed nonzero storage.
struct Gradients {
  VectorX encoder;
  VectorX decoder;
  Real loss = 0;
};

// Builds the network shape for one user. Items not present in the feature
// map are dropped before the m-count; fewer than 2 surviving items throws
// UserNotTrainable.
SparseTopology build_topology(const std::vector<std::pair<ItemId, int>>& user_ratings,
                              const ItemFeatureMap& feature_map, UserId user = 0);

// Normalized rating vector aligned with topology.items.
VectorX normalized_targets(const SparseTopology& topology,
                           const std::vector<std::pair<ItemId, int>>& user_ratings,
                           Real eps = 0.01);

UserAutoencoder make_autoencoder(SparseTopology topology, Real init_weight,
                                 UserId user = 0);

// hidden_f = sigmoid(sum of w_if * input_i over encoder edges into f);
// output_j = sigmoid(sum of v_fj * hidden_f over decoder edges into j).
Activations forward(const UserAutoencoder& net, const VectorX& input);

// loss = 1/2 * sum_j (output_j - target_j)^2, exact partials through both
// sigmoid layers. The training pair is (input = target, target); the general
// overload exists for checking.
Gradients compute_gradients(const UserAutoencoder& net, const VectorX& input,
                            const VectorX& target);
inline Gradients compute_gradients(const UserAutoencoder& net, const VectorX& target) {
  return compute_gradients(net, target, target);
}

// Full-batch gradient descent on the single (target, target) pair. Stops at
// rmse_target, when epoch-over-epoch improvement falls below
// min_improvement, or at max_epochs. Deterministic: no randomness anywhere.
std::pair<UserAutoencoder, TrainTrace> train(const SparseTopology& topology,
                                             const VectorX& target,
                                             const TrainConfig& config);

// Raw per-feature score: the sum of encoder weights on edges entering the
// feature (optionally also the mirrored decoder weights). Aligned with
// topology.features.
VectorX aggregate_feature_weights(const UserAutoencoder& net,
                                  bool include_decoder = false);

// Debug dump (topology + weights) in the same line-oriented format family
// as the feature map.
void save_autoencoder_debug(const UserAutoencoder& net, const ItemFeatureMap& feature_map,
                            const std::string& path);

}  // namespace semauto

#endif  // SEMAUTO_AUTOENCODER_HPP
