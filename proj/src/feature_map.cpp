#include "semauto/feature_map.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "semauto/io_util.hpp"

namespace semauto {

namespace {
constexpr std::string_view kFeatureMapHeader = "semauto-feature-map v1";
}

bool is_absolute_iri(std::string_view iri) {
  if (iri.size() < 3) return false;
  if (!std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  std::size_t colon = std::string_view::npos;
  for (std::size_t i = 1; i < iri.size(); ++i) {
    const char c = iri[i];
    if (c == ':') {
      colon = i;
      break;
    }
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;  // invalid scheme character before the colon
    }
  }
  if (colon == std::string_view::npos || colon + 1 >= iri.size()) return false;
  for (const char c : iri) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '>' ||
        static_cast<unsigned char>(c) < 0x20) {
      return false;
    }
  }
  return true;
}

void EntityMapping::set(ItemId item, std::string iri) {
  if (!is_absolute_iri(iri)) throw ContractViolation("entity IRI must be absolute: " + iri);
  items_[item] = std::move(iri);
}

const std::string* EntityMapping::find(ItemId item) const {
  auto it = items_.find(item);
  return it == items_.end() ? nullptr : &it->second;
}

std::map<std::string, std::vector<ItemId>> EntityMapping::by_entity() const {
  std::map<std::string, std::vector<ItemId>> out;
  for (const auto& [item, iri] : items_) out[iri].push_back(item);
  return out;
}

MappingParseResult parse_mapping(const std::string& path) {
  auto in = open_input(path);

  MappingParseResult result;
  std::string raw;
  while (std::getline(*in, raw)) {
    ++result.stats.lines;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "expected 3 tab-separated fields");
      continue;
    }
    const std::string_view id_field = line.substr(0, t1);
    std::string_view iri = line.substr(t2 + 1);
    // A third tab would mean extra fields; take the third column only.
    const std::size_t t3 = iri.find('\t');
    if (t3 != std::string_view::npos) iri = iri.substr(0, t3);

    std::int64_t item = 0;
    auto [ptr, ec] = std::from_chars(id_field.data(), id_field.data() + id_field.size(), item);
    if (ec != std::errc() || ptr != id_field.data() + id_field.size()) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines, "non-integer item id");
      continue;
    }
    if (!is_absolute_iri(iri)) {
      ++result.stats.malformed;
      result.stats.record_error(result.stats.lines,
                                "malformed or relative IRI: " + std::string(iri));
      continue;
    }
    if (result.mapping.find(item) != nullptr) ++result.stats.duplicates;
    result.mapping.set(item, std::string(iri));
    ++result.stats.accepted;
  }

  for (const auto& [_, items] : result.mapping.by_entity()) {
    if (items.size() > 1) ++result.shared_entities;
  }
  return result;
}

FeatureId ItemFeatureMap::intern(std::string_view iri) {
  auto it = vocab_index_.find(std::string(iri));
  if (it != vocab_index_.end()) return it->second;
  const FeatureId id = static_cast<FeatureId>(vocab_.size());
  vocab_.emplace_back(iri);
  vocab_index_.emplace(vocab_.back(), id);
  return id;
}

std::optional<FeatureId> ItemFeatureMap::find_feature(std::string_view iri) const {
  auto it = vocab_index_.find(std::string(iri));
  if (it == vocab_index_.end()) return std::nullopt;
  return it->second;
}

void ItemFeatureMap::add_item_feature(ItemId item, std::string_view iri) {
  const FeatureId id = intern(iri);
  auto& feats = items_[item];
  auto pos = std::lower_bound(feats.begin(), feats.end(), id);
  if (pos == feats.end() || *pos != id) feats.insert(pos, id);
}

const std::vector<FeatureId>* ItemFeatureMap::features_of(ItemId item) const {
  auto it = items_.find(item);
  return it == items_.end() ? nullptr : &it->second;
}

std::vector<ItemId> ItemFeatureMap::items() const {
  std::vector<ItemId> out;
  out.reserve(items_.size());
  for (const auto& [item, _] : items_) out.push_back(item);
  return out;
}

void ItemFeatureMap::canonicalize() {
  std::vector<FeatureId> order(vocab_.size());
  for (FeatureId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](FeatureId a, FeatureId b) { return vocab_[a] < vocab_[b]; });

  std::vector<FeatureId> remap(vocab_.size());
  std::vector<std::string> new_vocab(vocab_.size());
  for (FeatureId new_id = 0; new_id < order.size(); ++new_id) {
    remap[order[new_id]] = new_id;
    new_vocab[new_id] = std::move(vocab_[order[new_id]]);
  }
  vocab_ = std::move(new_vocab);
  vocab_index_.clear();
  for (FeatureId i = 0; i < vocab_.size(); ++i) vocab_index_.emplace(vocab_[i], i);

  for (auto& [_, feats] : items_) {
    for (auto& f : feats) f = remap[f];
    std::sort(feats.begin(), feats.end());
  }
}

bool operator==(const ItemFeatureMap& a, const ItemFeatureMap& b) {
  if (a.items_.size() != b.items_.size()) return false;
  if (a.vocab_.size() != b.vocab_.size()) return false;
  auto iris_of = [](const ItemFeatureMap& m, const std::vector<FeatureId>& feats) {
    std::vector<std::string> iris;
    iris.reserve(feats.size());
    for (const FeatureId f : feats) iris.push_back(m.vocab_[f]);
    std::sort(iris.begin(), iris.end());
    return iris;
  };
  auto ita = a.items_.begin();
  auto itb = b.items_.begin();
  for (; ita != a.items_.end(); ++ita, ++itb) {
    if (ita->first != itb->first) return false;
    if (iris_of(a, ita->second) != iris_of(b, itb->second)) return false;
  }
  return true;
}

void save_feature_map(const ItemFeatureMap& map, const std::string& path) {
  AtomicFile file(path);
  std::ostream& out = file.stream();
  out << kFeatureMapHeader << "\n";
  for (const ItemId item : map.items()) {
    const auto* feats = map.features_of(item);
    std::vector<std::string> iris;
    iris.reserve(feats->size());
    for (const FeatureId f : *feats) iris.push_back(map.feature_iri(f));
    std::sort(iris.begin(), iris.end());
    out << item << '\t';
    for (std::size_t i = 0; i < iris.size(); ++i) {
      if (i > 0) out << ' ';
      out << iris[i];
    }
    out << '\n';
  }
  file.commit();
}

ItemFeatureMap load_feature_map(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(*in, line) || line != kFeatureMapHeader) {
    throw FormatError("bad feature map header in " + path + " (expected \"" +
                      std::string(kFeatureMapHeader) + "\")");
  }

  ItemFeatureMap map;
  std::size_t line_no = 1;
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("feature map " + path + " line " + std::to_string(line_no) +
                        ": missing tab");
    }
    std::int64_t item = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, item);
    if (ec != std::errc() || ptr != line.data() + tab) {
      throw FormatError("feature map " + path + " line " + std::to_string(line_no) +
                        ": bad item id");
    }
    std::istringstream feats(line.substr(tab + 1));
    std::string iri;
    std::size_t count = 0;
    while (feats >> iri) {
      map.add_item_feature(item, iri);
      ++count;
    }
    if (count == 0) {
      throw FormatError("feature map " + path + " line " + std::to_string(line_no) +
                        ": item with no features");
    }
  }
  map.canonicalize();
  return map;
}

}  // namespace semauto
