#ifndef SEMAUTO_NTRIPLES_HPP
#define SEMAUTO_NTRIPLES_HPP

#include <istream>
#include <string>
#include <vector>

#include "semauto/feature_map.hpp"

namespace semauto {

inline const std::vector<std::string> kDefaultFeaturePredicates = {
    "http://purl.org/dc/terms/subject",
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
};

enum class TermKind { iri, blank, literal };

struct Triple {
  std::string subject;   // IRI or blank label
  std::string predicate; // always an IRI
  std::string object;
  TermKind subject_kind = TermKind::iri;
  TermKind object_kind = TermKind::iri;
};

// Line-oriented streaming reader. Comment and blank lines are skipped
// silently; unparseable lines are counted and skipped.
class NTriplesReader {
 public:
  explicit NTriplesReader(std::istream& in) : in_(in) {}

  bool next(Triple& out);

  std::size_t lines() const { return lines_; }
  std::size_t skipped() const { return skipped_; }

 private:
  std::istream& in_;
  std::size_t lines_ = 0;
  std::size_t skipped_ = 0;
};

struct ExtractOptions {
  std::vector<std::string> predicates = kDefaultFeaturePredicates;
  // When set, objects of rdf:type triples are kept only if their IRI starts
  // with this prefix. Other predicates are unaffected.
  std::string type_namespace_filter;
};

struct ExtractStats {
  std::size_t triples = 0;           // well-formed triples seen
  std::size_t skipped_lines = 0;     // unparseable lines
  std::size_t matched = 0;           // triples contributing a feature
  std::size_t non_iri_objects = 0;   // literal/blank objects of chosen predicates
  std::size_t filtered_objects = 0;  // dropped by the namespace filter
  std::size_t items_without_features = 0;  // mapped items absent from the result
};

// For each mapped item, collects the objects of triples
// <entity(item), p, o> with p among the chosen predicates and o an IRI.
// Items whose entity yields no such triple are left out of the map.
// Throws when no triple matched at all.
ItemFeatureMap extract_features(std::istream& ntriples, const EntityMapping& mapping,
                                const ExtractOptions& options = {},
                                ExtractStats* stats = nullptr);

// Convenience overload reading from a (possibly gzip-compressed) file.
ItemFeatureMap extract_features_from_file(const std::string& path,
                                          const EntityMapping& mapping,
                                          const ExtractOptions& options = {},
                                          ExtractStats* stats = nullptr);

}  // namespace semauto

#endif  // SEMAUTO_NTRIPLES_HPP
