#include "semauto/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "semauto/rng.hpp"

using namespace semauto;

namespace {

// Two items, three features: C(1) = {a, b}, C(2) = {b, c}.
ItemFeatureMap two_item_map() {
  ItemFeatureMap fm;
  fm.add_item_feature(1, "urn:c:a");
  fm.add_item_feature(1, "urn:c:b");
  fm.add_item_feature(2, "urn:c:b");
  fm.add_item_feature(2, "urn:c:c");
  fm.canonicalize();
  return fm;
}

std::vector<std::pair<ItemId, int>> two_item_ratings() { return {{1, 5}, {2, 1}}; }

}  // namespace

TEST_CASE("build_topology mirrors the per-item feature sets") {
  const ItemFeatureMap fm = two_item_map();
  const SparseTopology topo = build_topology(two_item_ratings(), fm);
  CHECK(topo.items == std::vector<ItemId>{1, 2});
  CHECK(topo.features.size() == 3);
  CHECK(topo.edge_count == 4);
  // item 1 -> {a, b} = local {0, 1}; item 2 -> {b, c} = local {1, 2}
  CHECK(topo.item_features[0] == std::vector<SpIndex>{0, 1});
  CHECK(topo.item_features[1] == std::vector<SpIndex>{1, 2});
}

TEST_CASE("a feature shared by two items has in-degree 2") {
  ItemFeatureMap fm;
  fm.add_item_feature(10, "urn:cat:American_films");
  fm.add_item_feature(20, "urn:cat:American_films");
  fm.add_item_feature(20, "urn:cat:Other");
  fm.canonicalize();
  const SparseTopology topo = build_topology({{10, 4}, {20, 3}}, fm);
  const UserAutoencoder net = make_autoencoder(topo, 0.001);

  const auto shared = fm.find_feature("urn:cat:American_films");
  REQUIRE(shared.has_value());
  const auto pos = std::lower_bound(topo.features.begin(), topo.features.end(), *shared);
  const Eigen::Index row = pos - topo.features.begin();
  std::size_t in_degree = 0;
  for (SparseMat::InnerIterator it(net.encoder, row); it; ++it) ++in_degree;
  CHECK(in_degree == 2);
}

TEST_CASE("items unknown to the KG are excluded before the m-count") {
  ItemFeatureMap fm;
  fm.add_item_feature(1, "urn:a");
  fm.add_item_feature(2, "urn:b");
  fm.add_item_feature(3, "urn:a");
  fm.canonicalize();
  const SparseTopology topo =
      build_topology({{1, 5}, {2, 4}, {3, 3}, {90, 2}, {91, 1}}, fm);
  CHECK(topo.items.size() == 3);
}

TEST_CASE("fewer than 2 mapped items means the user is not trainable") {
  ItemFeatureMap fm;
  fm.add_item_feature(1, "urn:a");
  fm.canonicalize();
  CHECK_THROWS_AS(build_topology({{1, 5}, {90, 4}}, fm, 42), UserNotTrainable);
  try {
    build_topology({{90, 4}, {91, 2}}, fm, 42);
    FAIL("expected UserNotTrainable");
  } catch (const UserNotTrainable& e) {
    CHECK(e.user_id == 42);
    CHECK(e.mapped_item_count == 0);
  }
}

TEST_CASE("hidden size = |union C_i| and edge count = sum |C_i| on random maps") {
  SplitMix64 rng(7);
  for (int round = 0; round < 50; ++round) {
    ItemFeatureMap fm;
    std::vector<std::pair<ItemId, int>> ratings;
    std::set<std::string> union_iris;
    std::size_t edge_total = 0;
    const std::size_t items = 2 + uniform_below(rng, 9);
    for (std::size_t i = 1; i <= items; ++i) {
      std::set<std::string> iris;
      const std::size_t count = 1 + uniform_below(rng, 5);
      for (std::size_t c = 0; c < count; ++c) {
        iris.insert("urn:f:" + std::to_string(uniform_below(rng, 15)));
      }
      for (const auto& iri : iris) fm.add_item_feature(static_cast<ItemId>(i), iri);
      union_iris.insert(iris.begin(), iris.end());
      edge_total += iris.size();
      ratings.emplace_back(static_cast<ItemId>(i), 3);
    }
    fm.canonicalize();
    const SparseTopology topo = build_topology(ratings, fm);
    CHECK(topo.features.size() == union_iris.size());
    CHECK(topo.edge_count == edge_total);
    const UserAutoencoder net = make_autoencoder(topo, 0.001);
    CHECK(static_cast<std::size_t>(net.encoder.nonZeros()) == edge_total);
    CHECK(static_cast<std::size_t>(net.decoder.nonZeros()) == edge_total);
  }
}

TEST_CASE("forward with all-zero weights gives 0.5 everywhere") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  UserAutoencoder net = make_autoencoder(topo, 0.001);
  for (Eigen::Index e = 0; e < net.encoder.nonZeros(); ++e) net.encoder.valuePtr()[e] = 0;
  for (Eigen::Index e = 0; e < net.decoder.nonZeros(); ++e) net.decoder.valuePtr()[e] = 0;

  VectorX input(2);
  input << 0.2, 0.9;
  const Activations act = forward(net, input);
  for (Eigen::Index f = 0; f < act.hidden.size(); ++f) CHECK(act.hidden[f] == 0.5);
  for (Eigen::Index j = 0; j < act.output.size(); ++j) CHECK(act.output[j] == 0.5);
}

TEST_CASE("single item/single feature with zero weights outputs 0.5 for any input") {
  // Built directly: build_topology would reject a 1-item user.
  SparseTopology topo;
  topo.items = {1};
  topo.features = {0};
  topo.item_features = {{0}};
  topo.edge_count = 1;
  UserAutoencoder net = make_autoencoder(topo, 0.001);
  net.encoder.valuePtr()[0] = 0;
  net.decoder.valuePtr()[0] = 0;
  for (const Real x : {0.01, 0.5, 0.99}) {
    VectorX input(1);
    input << x;
    const Activations act = forward(net, input);
    CHECK(act.hidden[0] == 0.5);
    CHECK(act.output[0] == 0.5);
  }
}

TEST_CASE("forward matches a straight-line recomputation of the formulas") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  const UserAutoencoder net = make_autoencoder(topo, 0.001);
  VectorX input(2);
  input << 0.99, 0.01;

  const Activations act = forward(net, input);
  const auto [ref_hidden, ref_output] = testutil::reference_forward(net, input);
  REQUIRE(act.hidden.size() == static_cast<Eigen::Index>(ref_hidden.size()));
  for (Eigen::Index f = 0; f < act.hidden.size(); ++f) {
    CHECK(act.hidden[f] == doctest::Approx(ref_hidden[f]).epsilon(1e-15));
  }
  for (Eigen::Index j = 0; j < act.output.size(); ++j) {
    CHECK(act.output[j] == doctest::Approx(ref_output[j]).epsilon(1e-15));
  }

  // And on a sample of random nets with random weights.
  SplitMix64 rng(31);
  for (int round = 0; round < 20; ++round) {
    const SparseTopology rt = testutil::random_topology(rng);
    UserAutoencoder rnet = make_autoencoder(rt, 0.001);
    testutil::randomize_weights(rnet, rng);
    const VectorX rin = testutil::random_target(rng, rt.item_dim());
    const Activations ract = forward(rnet, rin);
    const auto [rh, ro] = testutil::reference_forward(rnet, rin);
    for (Eigen::Index f = 0; f < ract.hidden.size(); ++f) {
      CHECK(ract.hidden[f] == doctest::Approx(rh[f]).epsilon(1e-14));
    }
    for (Eigen::Index j = 0; j < ract.output.size(); ++j) {
      CHECK(ract.output[j] == doctest::Approx(ro[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("forward rejects a wrong input length") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  const UserAutoencoder net = make_autoencoder(topo, 0.001);
  VectorX bad(3);
  bad << 0.1, 0.2, 0.3;
  CHECK_THROWS_AS(forward(net, bad), ContractViolation);
}

TEST_CASE("gradients vanish at a stationary point") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  UserAutoencoder net = make_autoencoder(topo, 0.001);
  VectorX input(2);
  input << 0.7, 0.3;
  // Choose the target to be exactly the current output.
  const VectorX target = forward(net, input).output;
  const Gradients g = compute_gradients(net, input, target);
  CHECK(g.loss == 0);
  CHECK(g.encoder.cwiseAbs().maxCoeff() == 0);
  CHECK(g.decoder.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("doubling the residual quadruples the loss") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  const UserAutoencoder net = make_autoencoder(topo, 0.001);
  VectorX input(2);
  input << 0.6, 0.4;
  const VectorX out = forward(net, input).output;
  VectorX residual(2);
  residual << 0.05, -0.03;

  const Real loss1 = compute_gradients(net, input, out - residual).loss;
  const Real loss2 = compute_gradients(net, input, out - 2.0 * residual).loss;
  CHECK(loss2 == doctest::Approx(4.0 * loss1).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences on random nets") {
  SplitMix64 rng(12345);
  double max_err = 0;
  for (int round = 0; round < 25; ++round) {
    const SparseTopology topo = testutil::random_topology(rng);
    UserAutoencoder net = make_autoencoder(topo, 0.001);
    testutil::randomize_weights(net, rng);
    const VectorX target = testutil::random_target(rng, topo.item_dim());

    const Gradients g = compute_gradients(net, target);
    const auto fd = testutil::finite_difference_gradients(net, target, target);
    for (Eigen::Index e = 0; e < g.encoder.size(); ++e) {
      max_err = std::max(max_err, testutil::gradient_rel_error(
                                      g.encoder[e], fd.encoder[static_cast<std::size_t>(e)]));
    }
    for (Eigen::Index e = 0; e < g.decoder.size(); ++e) {
      max_err = std::max(max_err, testutil::gradient_rel_error(
                                      g.decoder[e], fd.decoder[static_cast<std::size_t>(e)]));
    }
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("training on a 0.5 target is already near the fixed point") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  VectorX target(2);
  target << 0.5, 0.5;
  const auto [net, trace] = train(topo, target, TrainConfig{});
  CHECK(trace.initial_rmse() < 0.01);
  CHECK(trace.epochs_run < 50);
  CHECK(trace.final_rmse() <= trace.initial_rmse());
}

TEST_CASE("final RMSE never exceeds initial RMSE on fixtures at defaults") {
  SplitMix64 rng(888);
  for (int round = 0; round < 10; ++round) {
    const SparseTopology topo = testutil::random_topology(rng, 8, 12);
    const VectorX target = testutil::random_target(rng, topo.item_dim());
    const auto [net, trace] = train(topo, target, TrainConfig{});
    CHECK(trace.final_rmse() <= trace.initial_rmse());
  }
}

TEST_CASE("the 2-item/3-feature fixture trains below RMSE 0.05 at defaults") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  VectorX target(2);
  target << 0.99, 0.01;
  const auto [net, trace] = train(topo, target, TrainConfig{});
  CHECK(trace.final_rmse() < 0.05);
  CHECK(trace.epochs_run <= 5000);
}

TEST_CASE("training twice gives bit-identical weights") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  VectorX target(2);
  target << 0.99, 0.25;
  const auto [net1, trace1] = train(topo, target, TrainConfig{});
  const auto [net2, trace2] = train(topo, target, TrainConfig{});
  REQUIRE(net1.encoder.nonZeros() == net2.encoder.nonZeros());
  for (Eigen::Index e = 0; e < net1.encoder.nonZeros(); ++e) {
    CHECK(net1.encoder.valuePtr()[e] == net2.encoder.valuePtr()[e]);
  }
  for (Eigen::Index e = 0; e < net1.decoder.nonZeros(); ++e) {
    CHECK(net1.decoder.valuePtr()[e] == net2.decoder.valuePtr()[e]);
  }
  CHECK(trace1.rmse_per_epoch == trace2.rmse_per_epoch);
}

TEST_CASE("training aborts with a diagnostic on a non-finite loss") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  VectorX target(2);
  target << std::numeric_limits<Real>::quiet_NaN(), 0.5;
  CHECK_THROWS_WITH_AS(train(topo, target, TrainConfig{}),
                       doctest::Contains("non-finite"), Error);
}

TEST_CASE("TrainConfig validation") {
  TrainConfig bad;
  bad.init_weight = 0.5;  // above the 0.01 ceiling
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  bad = TrainConfig{};
  bad.learning_rate = 0;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  CHECK_NOTHROW(TrainConfig{}.validate());
}

TEST_CASE("aggregate_feature_weights sums encoder in-edges") {
  ItemFeatureMap fm;
  fm.add_item_feature(1, "urn:cat:American_films");
  fm.add_item_feature(2, "urn:cat:American_films");
  fm.canonicalize();
  const SparseTopology topo = build_topology({{1, 5}, {2, 4}}, fm);
  UserAutoencoder net = make_autoencoder(topo, 0.001);
  // Both encoder edges enter the single feature: w11 = 0.2, w21 = 0.1.
  net.encoder.valuePtr()[0] = 0.2;
  net.encoder.valuePtr()[1] = 0.1;
  const VectorX raw = aggregate_feature_weights(net);
  REQUIRE(raw.size() == 1);
  CHECK(raw[0] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("untrained net with init 0.001 and in-degree 3 aggregates to 0.003") {
  ItemFeatureMap fm;
  fm.add_item_feature(1, "urn:f");
  fm.add_item_feature(2, "urn:f");
  fm.add_item_feature(3, "urn:f");
  fm.add_item_feature(3, "urn:g");
  fm.canonicalize();
  const SparseTopology topo = build_topology({{1, 3}, {2, 3}, {3, 3}}, fm);
  const UserAutoencoder net = make_autoencoder(topo, 0.001);
  const VectorX raw = aggregate_feature_weights(net);
  const auto f = fm.find_feature("urn:f");
  const auto pos = std::lower_bound(topo.features.begin(), topo.features.end(), *f);
  CHECK(raw[pos - topo.features.begin()] == doctest::Approx(0.003).epsilon(1e-15));
}

TEST_CASE("aggregate with include_decoder adds the mirrored decoder weights") {
  const SparseTopology topo = build_topology(two_item_ratings(), two_item_map());
  const UserAutoencoder net = make_autoencoder(topo, 0.001);
  const VectorX enc_only = aggregate_feature_weights(net, false);
  const VectorX both = aggregate_feature_weights(net, true);
  for (Eigen::Index f = 0; f < enc_only.size(); ++f) {
    CHECK(both[f] == doctest::Approx(2.0 * enc_only[f]).epsilon(1e-15));
  }
}

TEST_CASE("features with identical incident item sets train to bit-equal weights") {
  // urn:p and urn:q are carried by exactly the items {1, 2}.
  ItemFeatureMap fm;
  fm.add_item_feature(1, "urn:p");
  fm.add_item_feature(1, "urn:q");
  fm.add_item_feature(2, "urn:p");
  fm.add_item_feature(2, "urn:q");
  fm.add_item_feature(2, "urn:solo");
  fm.canonicalize();
  const SparseTopology topo = build_topology({{1, 5}, {2, 2}}, fm);
  VectorX target(2);
  target << 0.99, 0.25;

  const auto fp = fm.find_feature("urn:p");
  const auto fq = fm.find_feature("urn:q");
  const auto local = [&](FeatureId f) {
    return std::lower_bound(topo.features.begin(), topo.features.end(), f) -
           topo.features.begin();
  };

  // Exact equality must hold at every epoch count, not just at convergence.
  for (const int epochs : {0, 1, 2, 3, 5, 10, 500}) {
    TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.rmse_target = 0;  // run the full epoch budget
    cfg.min_improvement = 0;
    const auto [net, trace] = train(topo, target, cfg);
    const VectorX raw = aggregate_feature_weights(net);
    CHECK(raw[local(*fp)] == raw[local(*fq)]);
  }
}
