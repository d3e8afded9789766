#include "semauto/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "semauto/io_util.hpp"

namespace semauto {

namespace {
constexpr std::string_view kProfilesHeader = "semauto-profiles v1";
}

FeatureProfile::FeatureProfile(UserId user, std::vector<ProfileEntry> entries)
    : user_(user), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) { return a.feature < b.feature; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].feature == entries_[i - 1].feature) {
      throw ContractViolation("duplicate feature in profile");
    }
  }
  Real sq = 0;
  for (const auto& e : entries_) {
    if (!(e.weight >= 0 && e.weight <= 1)) {
      throw ContractViolation("profile weight outside [0,1]");
    }
    sq += e.weight * e.weight;
  }
  norm_ = std::sqrt(sq);
}

const ProfileEntry* FeatureProfile::find(FeatureId f) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), f,
      [](const ProfileEntry& e, FeatureId id) { return e.feature < id; });
  if (it == entries_.end() || it->feature != f) return nullptr;
  return &*it;
}

Real FeatureProfile::weight_or_zero(FeatureId f) const {
  const ProfileEntry* e = find(f);
  return e == nullptr ? 0.0 : e->weight;
}

FeatureProfile build_profile(UserId user,
                             const std::vector<std::pair<FeatureId, Real>>& raw) {
  if (raw.empty()) throw Error("cannot build a profile from an empty raw weight map");

  Real lo = raw.front().second, hi = raw.front().second;
  for (const auto& [_, w] : raw) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }

  std::vector<ProfileEntry> entries;
  entries.reserve(raw.size());
  if (hi > lo) {
    for (const auto& [f, w] : raw) {
      entries.push_back({f, (w - lo) / (hi - lo), Provenance::trained});
    }
  } else {
    // All raw weights equal: no ordering information, keep everything at the
    // midpoint so the profile stays usable.
    for (const auto& [f, _] : raw) entries.push_back({f, 0.5, Provenance::trained});
  }
  return FeatureProfile(user, std::move(entries));
}

FeatureProfile build_profile(const UserAutoencoder& net, const VectorX& raw_weights) {
  std::vector<std::pair<FeatureId, Real>> raw;
  raw.reserve(net.topology.features.size());
  for (std::size_t i = 0; i < net.topology.features.size(); ++i) {
    raw.emplace_back(net.topology.features[i], raw_weights[static_cast<Eigen::Index>(i)]);
  }
  return build_profile(net.user, raw);
}

Real cosine_similarity(const FeatureProfile& a, const FeatureProfile& b) {
  if (a.norm() == 0 || b.norm() == 0) return 0;
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  Real dot = 0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].feature < eb[j].feature) {
      ++i;
    } else if (eb[j].feature < ea[i].feature) {
      ++j;
    } else {
      dot += ea[i].weight * eb[j].weight;
      ++i;
      ++j;
    }
  }
  return dot / (a.norm() * b.norm());
}

void ProfileStore::add(FeatureProfile profile) {
  profiles_[profile.user()] = std::move(profile);
}

const FeatureProfile* ProfileStore::find(UserId user) const {
  auto it = profiles_.find(user);
  return it == profiles_.end() ? nullptr : &it->second;
}

std::vector<UserId> ProfileStore::users() const {
  std::vector<UserId> out;
  out.reserve(profiles_.size());
  for (const auto& [user, _] : profiles_) out.push_back(user);
  return out;
}

NeighborSet top_k_neighbors(UserId user, const ProfileStore& all_profiles, std::size_t k) {
  if (k < 1) throw ContractViolation("k must be >= 1");
  const FeatureProfile* own = all_profiles.find(user);

  NeighborSet result;
  result.user = user;
  result.neighbors.reserve(all_profiles.size());
  for (const auto& [other, profile] : all_profiles.all()) {
    if (other == user) continue;
    const Real sim = own == nullptr ? 0.0 : cosine_similarity(*own, profile);
    result.neighbors.push_back({other, sim});
  }
  std::sort(result.neighbors.begin(), result.neighbors.end(),
            [](const Neighbor& a, const Neighbor& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.user < b.user;
            });
  if (result.neighbors.size() > k) result.neighbors.resize(k);
  return result;
}

FeatureProfile complete_profile(const FeatureProfile& p, const NeighborSet& neighbors,
                                const ProfileStore& neighbor_profiles, std::size_t k,
                                bool divide_by_possessing_count) {
  if (k < 1) throw ContractViolation("k must be >= 1");
  if (neighbors.neighbors.size() > k) {
    throw ContractViolation("neighbor set is larger than k; was it computed with the same k?");
  }

  // feature -> (sum of neighbor weights, count of neighbors carrying it)
  std::map<FeatureId, std::pair<Real, std::size_t>> sums;
  for (const Neighbor& nb : neighbors.neighbors) {
    const FeatureProfile* np = neighbor_profiles.find(nb.user);
    if (np == nullptr) continue;
    for (const ProfileEntry& e : np->entries()) {
      if (p.has(e.feature)) continue;  // trained features are never touched
      auto& acc = sums[e.feature];
      acc.first += e.weight;
      acc.second += 1;
    }
  }

  std::vector<ProfileEntry> merged = p.entries();
  merged.reserve(merged.size() + sums.size());
  for (const auto& [feature, acc] : sums) {
    const Real divisor =
        divide_by_possessing_count ? static_cast<Real>(acc.second) : static_cast<Real>(k);
    merged.push_back({feature, acc.first / divisor, Provenance::neighbor_estimated});
  }
  return FeatureProfile(p.user(), std::move(merged));
}

void save_profiles(const ProfileStore& store, const ItemFeatureMap& vocab,
                   const std::string& path) {
  AtomicFile file(path);
  std::ostream& out = file.stream();
  out << kProfilesHeader << "\n";
  char buf[64];
  for (const auto& [user, profile] : store.all()) {
    out << "u " << user << "\n";
    for (const ProfileEntry& e : profile.entries()) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
      out << (e.provenance == Provenance::trained ? "t " : "e ") << buf << ' '
          << vocab.feature_iri(e.feature) << "\n";
    }
  }
  file.commit();
}

ProfileStore load_profiles(const std::string& path, const ItemFeatureMap& vocab) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(*in, line) || line != kProfilesHeader) {
    throw FormatError("bad profiles header in " + path);
  }

  ProfileStore store;
  bool have_user = false;
  UserId user = 0;
  std::vector<ProfileEntry> entries;
  std::size_t line_no = 1;

  auto flush = [&] {
    if (have_user) store.add(FeatureProfile(user, std::move(entries)));
    entries = {};
  };

  while (std::getline(*in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "u") {
      flush();
      if (!(ss >> user)) throw FormatError(path + " line " + std::to_string(line_no) + ": bad user id");
      have_user = true;
    } else if (tag == "t" || tag == "e") {
      if (!have_user) throw FormatError(path + " line " + std::to_string(line_no) + ": entry before user");
      Real w = 0;
      std::string iri;
      if (!(ss >> w >> iri)) {
        throw FormatError(path + " line " + std::to_string(line_no) + ": bad profile entry");
      }
      const auto f = vocab.find_feature(iri);
      if (!f) throw FormatError(path + " line " + std::to_string(line_no) + ": unknown feature " + iri);
      entries.push_back(
          {*f, w, tag == "t" ? Provenance::trained : Provenance::neighbor_estimated});
    } else {
      throw FormatError(path + " line " + std::to_string(line_no) + ": unknown record tag " + tag);
    }
  }
  flush();
  return store;
}

}  // namespace semauto
