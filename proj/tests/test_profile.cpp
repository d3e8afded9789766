#include "semauto/profile.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "semauto/rng.hpp"

using namespace semauto;

namespace {

FeatureProfile make_profile(UserId user, std::vector<std::pair<FeatureId, Real>> weights,
                            Provenance prov = Provenance::trained) {
  std::vector<ProfileEntry> entries;
  for (const auto& [f, w] : weights) entries.push_back({f, w, prov});
  return FeatureProfile(user, std::move(entries));
}

}  // namespace

TEST_CASE("build_profile min-max normalizes raw weights") {
  const FeatureProfile p = build_profile(1, {{0, 0.1}, {1, 0.3}, {2, 0.5}});
  CHECK(p.weight_or_zero(0) == doctest::Approx(0.0));
  CHECK(p.weight_or_zero(1) == doctest::Approx(0.5));
  CHECK(p.weight_or_zero(2) == doctest::Approx(1.0));
}

TEST_CASE("build_profile degenerates to 0.5 when all raw weights are equal") {
  const FeatureProfile two = build_profile(1, {{0, 0.2}, {1, 0.2}});
  CHECK(two.weight_or_zero(0) == 0.5);
  CHECK(two.weight_or_zero(1) == 0.5);

  const FeatureProfile one = build_profile(1, {{7, 0.7}});
  CHECK(one.weight_or_zero(7) == 0.5);
}

TEST_CASE("build_profile rejects an empty raw map") {
  CHECK_THROWS_AS(build_profile(1, {}), Error);
}

TEST_CASE("build_profile: min maps to 0 and max to 1 whenever max > min") {
  SplitMix64 rng(5);
  for (int round = 0; round < 20; ++round) {
    std::vector<std::pair<FeatureId, Real>> raw;
    const std::size_t count = 2 + uniform_below(rng, 20);
    for (std::size_t i = 0; i < count; ++i) {
      raw.emplace_back(static_cast<FeatureId>(i), 2.0 * uniform_real(rng) - 1.0);
    }
    const FeatureProfile p = build_profile(1, raw);
    Real lo = 2, hi = -2;
    for (const auto& e : p.entries()) {
      CHECK(e.weight >= 0.0);
      CHECK(e.weight <= 1.0);
      lo = std::min(lo, e.weight);
      hi = std::max(hi, e.weight);
    }
    const bool degenerate = [&] {
      for (const auto& [_, w] : raw) {
        if (w != raw.front().second) return false;
      }
      return true;
    }();
    if (!degenerate) {
      CHECK(lo == 0.0);
      CHECK(hi == 1.0);
    }
  }
}

TEST_CASE("cosine similarity of identical non-zero profiles is 1") {
  const FeatureProfile p = make_profile(1, {{0, 0.4}, {3, 0.8}});
  CHECK(cosine_similarity(p, p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine similarity of disjoint profiles is 0") {
  const FeatureProfile a = make_profile(1, {{0, 0.4}, {1, 0.8}});
  const FeatureProfile b = make_profile(2, {{2, 0.9}});
  CHECK(cosine_similarity(a, b) == 0.0);
}

TEST_CASE("cosine similarity hand case: 1/1.25 = 0.8") {
  const FeatureProfile a = make_profile(1, {{0, 1.0}, {1, 0.5}});
  const FeatureProfile b = make_profile(2, {{0, 0.5}, {1, 1.0}});
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("cosine similarity is symmetric and scale-invariant") {
  SplitMix64 rng(17);
  for (int round = 0; round < 20; ++round) {
    std::vector<ProfileEntry> ea, eb;
    for (FeatureId f = 0; f < 12; ++f) {
      if (uniform_real(rng) < 0.6) ea.push_back({f, uniform_real(rng), Provenance::trained});
      if (uniform_real(rng) < 0.6) eb.push_back({f, uniform_real(rng), Provenance::trained});
    }
    const FeatureProfile a(1, ea), b(2, eb);
    const Real ab = cosine_similarity(a, b);
    CHECK(ab == cosine_similarity(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);

    // Uniform positive scaling of one side leaves cosine unchanged.
    std::vector<ProfileEntry> scaled = ea;
    for (auto& e : scaled) e.weight *= 0.25;
    const FeatureProfile a_scaled(1, scaled);
    CHECK(cosine_similarity(a_scaled, b) == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("all-zero profiles have similarity 0 by definition") {
  const FeatureProfile zero = make_profile(1, {{0, 0.0}, {1, 0.0}});
  const FeatureProfile other = make_profile(2, {{0, 0.5}});
  CHECK(cosine_similarity(zero, other) == 0.0);
  CHECK(cosine_similarity(zero, zero) == 0.0);
  const FeatureProfile empty(3, {});
  CHECK(cosine_similarity(empty, other) == 0.0);
}

TEST_CASE("top_k_neighbors picks the highest similarities") {
  ProfileStore store;
  store.add(make_profile(1, {{0, 1.0}}));
  store.add(make_profile(2, {{0, 1.0}, {1, 0.1}}));   // high sim to 1
  store.add(make_profile(3, {{1, 1.0}}));             // orthogonal to 1
  store.add(make_profile(4, {{0, 0.6}, {1, 0.6}}));   // middling
  const NeighborSet nb = top_k_neighbors(1, store, 2);
  REQUIRE(nb.neighbors.size() == 2);
  CHECK(nb.neighbors[0].user == 2);
  CHECK(nb.neighbors[1].user == 4);
  CHECK(nb.neighbors[0].similarity >= nb.neighbors[1].similarity);
}

TEST_CASE("top_k_neighbors saturates when k exceeds the population") {
  ProfileStore store;
  store.add(make_profile(1, {{0, 1.0}}));
  store.add(make_profile(2, {{0, 0.5}}));
  store.add(make_profile(3, {{0, 0.25}}));
  const NeighborSet nb = top_k_neighbors(1, store, 10);
  CHECK(nb.neighbors.size() == 2);  // population minus the user itself
}

TEST_CASE("top_k_neighbors excludes the user and breaks ties by id") {
  ProfileStore store;
  store.add(make_profile(5, {{0, 1.0}}));
  store.add(make_profile(9, {{0, 0.3}}));  // same direction: similarity 1
  store.add(make_profile(2, {{0, 0.7}}));  // same direction: similarity 1
  const NeighborSet nb = top_k_neighbors(5, store, 3);
  REQUIRE(nb.neighbors.size() == 2);
  CHECK(nb.neighbors[0].user == 2);  // tie on similarity 1.0, lower id first
  CHECK(nb.neighbors[1].user == 9);
  for (const auto& n : nb.neighbors) CHECK(n.user != 5);
}

TEST_CASE("top_k_neighbors equals brute-force full sort on a random fixture") {
  SplitMix64 rng(404);
  ProfileStore store;
  for (UserId u = 1; u <= 200; ++u) {
    std::vector<ProfileEntry> entries;
    for (FeatureId f = 0; f < 25; ++f) {
      if (uniform_real(rng) < 0.3) {
        entries.push_back({f, uniform_real(rng), Provenance::trained});
      }
    }
    store.add(FeatureProfile(u, std::move(entries)));
  }

  for (const UserId u : {UserId{1}, UserId{57}, UserId{200}}) {
    // Brute force: full sort of all (similarity, user) pairs.
    std::vector<Neighbor> all;
    for (const UserId other : store.users()) {
      if (other == u) continue;
      all.push_back({other, cosine_similarity(*store.find(u), *store.find(other))});
    }
    std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.user < b.user;
    });
    for (const std::size_t k : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
      const NeighborSet nb = top_k_neighbors(u, store, k);
      REQUIRE(nb.neighbors.size() == std::min(k, all.size()));
      for (std::size_t i = 0; i < nb.neighbors.size(); ++i) {
        CHECK(nb.neighbors[i].user == all[i].user);
        CHECK(nb.neighbors[i].similarity == all[i].similarity);
      }
    }
  }
}

TEST_CASE("complete_profile averages neighbor weights over k with zero-fill") {
  ProfileStore store;
  store.add(make_profile(1, {{0, 0.9}}));
  store.add(make_profile(2, {{0, 0.8}, {5, 0.4}}));
  store.add(make_profile(3, {{0, 0.7}, {5, 0.6}}));
  const NeighborSet nb = top_k_neighbors(1, store, 2);

  SUBCASE("both neighbors carry the feature: plain average") {
    const FeatureProfile done = complete_profile(*store.find(1), nb, store, 2);
    CHECK(done.weight_or_zero(5) == doctest::Approx(0.5));
    const ProfileEntry* e = done.find(5);
    REQUIRE(e != nullptr);
    CHECK(e->provenance == Provenance::neighbor_estimated);
  }

  SUBCASE("only one neighbor carries the feature: still divided by k") {
    ProfileStore store2;
    store2.add(make_profile(1, {{0, 0.9}}));
    store2.add(make_profile(2, {{0, 0.8}, {5, 0.8}}));
    store2.add(make_profile(3, {{0, 0.7}}));
    const NeighborSet nb2 = top_k_neighbors(1, store2, 2);
    const FeatureProfile done = complete_profile(*store2.find(1), nb2, store2, 2);
    CHECK(done.weight_or_zero(5) == doctest::Approx(0.4));

    const FeatureProfile alt =
        complete_profile(*store2.find(1), nb2, store2, 2, /*divide_by_possessing=*/true);
    CHECK(alt.weight_or_zero(5) == doctest::Approx(0.8));
  }
}

TEST_CASE("complete_profile never modifies trained features") {
  ProfileStore store;
  store.add(make_profile(1, {{0, 0.9}}));
  store.add(make_profile(2, {{0, 0.1}, {1, 0.2}}));
  store.add(make_profile(3, {{0, 0.1}, {1, 0.3}}));
  const NeighborSet nb = top_k_neighbors(1, store, 2);
  const FeatureProfile done = complete_profile(*store.find(1), nb, store, 2);
  CHECK(done.weight_or_zero(0) == doctest::Approx(0.9));
  CHECK(done.find(0)->provenance == Provenance::trained);
  CHECK(done.weight_or_zero(1) == doctest::Approx(0.25));
}

TEST_CASE("complete_profile keeps all weights inside [0,1] on random fixtures") {
  SplitMix64 rng(2323);
  ProfileStore store;
  for (UserId u = 1; u <= 30; ++u) {
    std::vector<ProfileEntry> entries;
    for (FeatureId f = 0; f < 15; ++f) {
      if (uniform_real(rng) < 0.4) entries.push_back({f, uniform_real(rng), Provenance::trained});
    }
    store.add(FeatureProfile(u, std::move(entries)));
  }
  for (const UserId u : store.users()) {
    const std::size_t k = 1 + uniform_below(rng, 10);
    const NeighborSet nb = top_k_neighbors(u, store, k);
    const FeatureProfile done = complete_profile(*store.find(u), nb, store, k);
    for (const auto& e : done.entries()) {
      CHECK(e.weight >= 0.0);
      CHECK(e.weight <= 1.0);
    }
    // Completion adds features from the union of neighbor features only.
    for (const auto& e : done.entries()) {
      if (e.provenance == Provenance::trained) continue;
      bool found = false;
      for (const auto& n : nb.neighbors) {
        if (store.find(n.user)->has(e.feature)) found = true;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("complete_profile rejects a neighbor set larger than k") {
  ProfileStore store;
  store.add(make_profile(1, {{0, 0.9}}));
  store.add(make_profile(2, {{0, 0.8}}));
  store.add(make_profile(3, {{0, 0.7}}));
  const NeighborSet nb = top_k_neighbors(1, store, 2);
  CHECK_THROWS_AS(complete_profile(*store.find(1), nb, store, 1), ContractViolation);
}

TEST_CASE("profiles round-trip through save/load bit-exactly") {
  ItemFeatureMap vocab;
  vocab.add_item_feature(1, "urn:f:alpha");
  vocab.add_item_feature(1, "urn:f:beta");
  vocab.add_item_feature(2, "urn:f:gamma");
  vocab.canonicalize();

  ProfileStore store;
  store.add(FeatureProfile(
      7, {{*vocab.find_feature("urn:f:alpha"), 0.12345678901234567, Provenance::trained},
          {*vocab.find_feature("urn:f:gamma"), 1.0 / 3.0, Provenance::neighbor_estimated}}));
  store.add(FeatureProfile(9, {{*vocab.find_feature("urn:f:beta"), 1.0, Provenance::trained}}));

  testutil::TempDir dir("profiles");
  save_profiles(store, vocab, dir.file("p.tsv"));
  const ProfileStore loaded = load_profiles(dir.file("p.tsv"), vocab);
  REQUIRE(loaded.size() == 2);
  const FeatureProfile* p7 = loaded.find(7);
  REQUIRE(p7 != nullptr);
  CHECK(p7->entries().size() == 2);
  CHECK(p7->weight_or_zero(*vocab.find_feature("urn:f:alpha")) == 0.12345678901234567);
  CHECK(p7->weight_or_zero(*vocab.find_feature("urn:f:gamma")) == 1.0 / 3.0);
  CHECK(p7->find(*vocab.find_feature("urn:f:gamma"))->provenance ==
        Provenance::neighbor_estimated);

  save_profiles(loaded, vocab, dir.file("p2.tsv"));
  CHECK(testutil::read_all(dir.file("p.tsv")) == testutil::read_all(dir.file("p2.tsv")));
}

TEST_CASE("load_profiles rejects bad headers and unknown features") {
  ItemFeatureMap vocab;
  vocab.add_item_feature(1, "urn:f:a");
  vocab.canonicalize();
  testutil::TempDir dir("profiles");

  testutil::write_file(dir.file("bad_header.tsv"), "not-a-profile-file\n");
  CHECK_THROWS_AS(load_profiles(dir.file("bad_header.tsv"), vocab), FormatError);

  testutil::write_file(dir.file("unknown.tsv"),
                       "semauto-profiles v1\nu 1\nt 0.5 urn:f:nope\n");
  CHECK_THROWS_AS(load_profiles(dir.file("unknown.tsv"), vocab), FormatError);

  testutil::write_file(dir.file("orphan.tsv"), "semauto-profiles v1\nt 0.5 urn:f:a\n");
  CHECK_THROWS_AS(load_profiles(dir.file("orphan.tsv"), vocab), FormatError);
}
