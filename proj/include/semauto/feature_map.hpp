#ifndef SEMAUTO_FEATURE_MAP_HPP
#define SEMAUTO_FEATURE_MAP_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semauto/dataset.hpp"
#include "semauto/errors.hpp"
#include "semauto/types.hpp"

namespace semauto {

// Syntactically absolute IRI: a scheme, then anything without whitespace or
// angle brackets. Deliberately permissive beyond the scheme check.
bool is_absolute_iri(std::string_view iri);

// item id -> entity IRI. Not necessarily injective; two items may share an
// entity (warned at parse time).
class EntityMapping {
 public:
  void set(ItemId item, std::string iri);
  const std::string* find(ItemId item) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::map<ItemId, std::string>& entries() const { return items_; }

  // entity IRI -> items mapped to it (ascending). Shared entities yield
  // multi-item vectors.
  std::map<std::string, std::vector<ItemId>> by_entity() const;

 private:
  std::map<ItemId, std::string> items_;
};

struct MappingParseResult {
  EntityMapping mapping;
  ParseStats stats;
  std::size_t shared_entities = 0;  // entities mapped by more than one item
};

// Tab-separated lines: item id, title, IRI. Lines with relative or malformed
// IRIs are rejected and counted.
MappingParseResult parse_mapping(const std::string& path);

// item -> set of categorical feature IRIs, interned into a global vocabulary.
// Items absent from the map are unknown to the knowledge graph. The
// vocabulary is exactly the union of all per-item feature sets.
class ItemFeatureMap {
 public:
  FeatureId intern(std::string_view iri);
  std::optional<FeatureId> find_feature(std::string_view iri) const;
  const std::string& feature_iri(FeatureId id) const { return vocab_.at(id); }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  void add_item_feature(ItemId item, std::string_view iri);

  // nullptr when the item is unknown to the KG. Ids ascending and unique.
  const std::vector<FeatureId>* features_of(ItemId item) const;
  bool has_item(ItemId item) const { return items_.count(item) != 0; }
  std::size_t item_count() const { return items_.size(); }
  std::vector<ItemId> items() const;  // ascending

  // Remaps feature ids so the vocabulary is in lexicographic IRI order.
  // Makes the id space independent of the order features were first seen.
  void canonicalize();

  // Equality on IRI-level content; feature id numbering is irrelevant.
  friend bool operator==(const ItemFeatureMap& a, const ItemFeatureMap& b);

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, FeatureId> vocab_index_;
  std::map<ItemId, std::vector<FeatureId>> items_;
};

// Line-oriented persistence: versioned header, then one record per item:
// item id, tab, space-separated feature IRIs (lexicographic). Round-trips
// bit-exact.
void save_feature_map(const ItemFeatureMap& map, const std::string& path);
ItemFeatureMap load_feature_map(const std::string& path);

}  // namespace semauto

#endif  // SEMAUTO_FEATURE_MAP_HPP
