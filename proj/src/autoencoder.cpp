#include "semauto/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semauto/dataset.hpp"
#include "semauto/io_util.hpp"

namespace semauto {

namespace {

Real sigmoid(Real x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const Real e = std::exp(x);
  return e / (1.0 + e);
}

Real rmse_of(const VectorX& output, const VectorX& target) {
  return std::sqrt((output - target).squaredNorm() / static_cast<Real>(target.size()));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(init_weight > 0 && init_weight <= 0.01)) {
    throw ContractViolation("init_weight must be in (0, 0.01]");
  }
  if (!(learning_rate > 0)) throw ContractViolation("learning_rate must be positive");
  if (max_epochs < 0) throw ContractViolation("max_epochs must be non-negative");
  if (!(rmse_target >= 0)) throw ContractViolation("rmse_target must be non-negative");
  if (!(min_improvement >= 0)) throw ContractViolation("min_improvement must be non-negative");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::target_reached: return "target_reached";
    case StopReason::converged: return "converged";
    case StopReason::max_epochs: return "max_epochs";
  }
  return "unknown";
}

SparseTopology build_topology(const std::vector<std::pair<ItemId, int>>& user_ratings,
                              const ItemFeatureMap& feature_map, UserId user) {
  SparseTopology topo;
  for (const auto& [item, _] : user_ratings) {
    if (feature_map.has_item(item)) topo.items.push_back(item);
  }
  std::sort(topo.items.begin(), topo.items.end());
  topo.items.erase(std::unique(topo.items.begin(), topo.items.end()), topo.items.end());
  if (topo.items.size() < 2) throw UserNotTrainable(user, topo.items.size());

  std::vector<FeatureId> all;
  for (const ItemId item : topo.items) {
    const auto* feats = feature_map.features_of(item);
    all.insert(all.end(), feats->begin(), feats->end());
    topo.edge_count += feats->size();
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  topo.features = std::move(all);

  topo.item_features.resize(topo.items.size());
  for (std::size_t i = 0; i < topo.items.size(); ++i) {
    const auto* feats = feature_map.features_of(topo.items[i]);
    topo.item_features[i].reserve(feats->size());
    for (const FeatureId f : *feats) {
      const auto pos = std::lower_bound(topo.features.begin(), topo.features.end(), f);
      topo.item_features[i].push_back(
          static_cast<SpIndex>(pos - topo.features.begin()));
    }
  }
  return topo;
}

VectorX normalized_targets(const SparseTopology& topology,
                           const std::vector<std::pair<ItemId, int>>& user_ratings,
                           Real eps) {
  VectorX target(topology.item_dim());
  target.setConstant(std::numeric_limits<Real>::quiet_NaN());
  for (const auto& [item, stars] : user_ratings) {
    const auto pos = std::lower_bound(topology.items.begin(), topology.items.end(), item);
    if (pos == topology.items.end() || *pos != item) continue;  // unmapped item
    target[pos - topology.items.begin()] = normalize_rating(stars, eps);
  }
  if (target.hasNaN()) {
    throw ContractViolation("user_ratings do not cover every topology item");
  }
  return target;
}

UserAutoencoder make_autoencoder(SparseTopology topology, Real init_weight, UserId user) {
  UserAutoencoder net;
  net.user = user;
  net.topology = std::move(topology);
  const auto& topo = net.topology;

  std::vector<Eigen::Triplet<Real>> enc;
  std::vector<Eigen::Triplet<Real>> dec;
  enc.reserve(topo.edge_count);
  dec.reserve(topo.edge_count);
  for (std::size_t i = 0; i < topo.item_features.size(); ++i) {
    for (const SpIndex f : topo.item_features[i]) {
      enc.emplace_back(f, static_cast<SpIndex>(i), init_weight);
      dec.emplace_back(static_cast<SpIndex>(i), f, init_weight);
    }
  }
  net.encoder.resize(topo.feature_dim(), topo.item_dim());
  net.encoder.setFromTriplets(enc.begin(), enc.end());
  net.encoder.makeCompressed();
  net.decoder.resize(topo.item_dim(), topo.feature_dim());
  net.decoder.setFromTriplets(dec.begin(), dec.end());
  net.decoder.makeCompressed();
  return net;
}

Activations forward(const UserAutoencoder& net, const VectorX& input) {
  if (input.size() != net.topology.item_dim()) {
    throw ContractViolation("input length does not match the item count");
  }
  Activations act;
  act.hidden = (net.encoder * input).unaryExpr([](Real x) { return sigmoid(x); });
  act.output = (net.decoder * act.hidden).unaryExpr([](Real x) { return sigmoid(x); });
  return act;
}

Gradients compute_gradients(const UserAutoencoder& net, const VectorX& input,
                            const VectorX& target) {
  if (target.size() != net.topology.item_dim()) {
    throw ContractViolation("target length does not match the item count");
  }
  const Activations act = forward(net, input);

  Gradients g;
  const VectorX diff = act.output - target;
  g.loss = 0.5 * diff.squaredNorm();

  // delta at the output pre-activation
  const VectorX delta_out =
      diff.cwiseProduct(act.output.cwiseProduct(VectorX::Ones(act.output.size()) - act.output));

  // Decoder gradients and the error pushed back onto hidden units, in one
  // pass over the decoder's nonzeros (row-major: grouped by output item).
  g.decoder.resize(net.decoder.nonZeros());
  VectorX back = VectorX::Zero(net.topology.feature_dim());
  Eigen::Index idx = 0;
  for (Eigen::Index j = 0; j < net.decoder.outerSize(); ++j) {
    for (SparseMat::InnerIterator it(net.decoder, j); it; ++it) {
      g.decoder[idx++] = delta_out[j] * act.hidden[it.col()];
      back[it.col()] += it.value() * delta_out[j];
    }
  }

  const VectorX delta_hidden =
      back.cwiseProduct(act.hidden.cwiseProduct(VectorX::Ones(act.hidden.size()) - act.hidden));

  g.encoder.resize(net.encoder.nonZeros());
  idx = 0;
  for (Eigen::Index f = 0; f < net.encoder.outerSize(); ++f) {
    for (SparseMat::InnerIterator it(net.encoder, f); it; ++it) {
      g.encoder[idx++] = delta_hidden[f] * input[it.col()];
    }
  }
  return g;
}

std::pair<UserAutoencoder, TrainTrace> train(const SparseTopology& topology,
                                             const VectorX& target,
                                             const TrainConfig& config) {
  config.validate();
  UserAutoencoder net = make_autoencoder(topology, config.init_weight);
  const VectorX& input = target;  // autoencoding: reproduce the input

  TrainTrace trace;
  Real prev_rmse = std::numeric_limits<Real>::infinity();
  for (int epoch = 0;; ++epoch) {
    const Activations act = forward(net, input);
    const Real rmse = rmse_of(act.output, target);
    if (!std::isfinite(rmse)) {
      throw Error("training diverged to a non-finite loss at epoch " + std::to_string(epoch) +
                  " (learning rate too high?)");
    }
    trace.rmse_per_epoch.push_back(rmse);

    if (rmse <= config.rmse_target) {
      trace.stop_reason = StopReason::target_reached;
      break;
    }
    if (epoch > 0 && prev_rmse - rmse < config.min_improvement) {
      trace.stop_reason = StopReason::converged;
      break;
    }
    if (epoch == config.max_epochs) {
      trace.stop_reason = StopReason::max_epochs;
      break;
    }
    prev_rmse = rmse;

    const Gradients g = compute_gradients(net, input, target);
    Eigen::Map<VectorX>(net.encoder.valuePtr(), net.encoder.nonZeros()) -=
        config.learning_rate * g.encoder;
    Eigen::Map<VectorX>(net.decoder.valuePtr(), net.decoder.nonZeros()) -=
        config.learning_rate * g.decoder;
  }
  trace.epochs_run = static_cast<int>(trace.rmse_per_epoch.size()) - 1;
  return {std::move(net), std::move(trace)};
}

VectorX aggregate_feature_weights(const UserAutoencoder& net, bool include_decoder) {
  VectorX raw = VectorX::Zero(net.topology.feature_dim());
  for (Eigen::Index f = 0; f < net.encoder.outerSize(); ++f) {
    for (SparseMat::InnerIterator it(net.encoder, f); it; ++it) raw[f] += it.value();
  }
  if (include_decoder) {
    for (Eigen::Index j = 0; j < net.decoder.outerSize(); ++j) {
      for (SparseMat::InnerIterator it(net.decoder, j); it; ++it) raw[it.col()] += it.value();
    }
  }
  return raw;
}

void save_autoencoder_debug(const UserAutoencoder& net, const ItemFeatureMap& feature_map,
                            const std::string& path) {
  AtomicFile file(path);
  std::ostream& out = file.stream();
  out << "semauto-autoencoder v1\n";
  out << "user\t" << net.user << "\n";
  out << "items\t" << net.topology.items.size() << "\n";
  out << "features\t" << net.topology.features.size() << "\n";
  out.precision(17);
  for (Eigen::Index f = 0; f < net.encoder.outerSize(); ++f) {
    for (SparseMat::InnerIterator it(net.encoder, f); it; ++it) {
      out << "enc\t" << net.topology.items[it.col()] << '\t'
          << feature_map.feature_iri(net.topology.features[f]) << '\t' << it.value() << "\n";
    }
  }
  for (Eigen::Index j = 0; j < net.decoder.outerSize(); ++j) {
    for (SparseMat::InnerIterator it(net.decoder, j); it; ++it) {
      out << "dec\t" << feature_map.feature_iri(net.topology.features[it.col()]) << '\t'
          << net.topology.items[j] << '\t' << it.value() << "\n";
    }
  }
  file.commit();
}

}  // namespace semauto
