#ifndef SEMAUTO_SPARQL_HPP
#define SEMAUTO_SPARQL_HPP

#include <string>
#include <vector>

#include "semauto/feature_map.hpp"
#include "semauto/ntriples.hpp"

namespace semauto {

struct SparqlOptions {
  std::string endpoint_url;  // http://host[:port][/path]
  std::size_t batch_size = 50;
  int max_retries = 3;          // attempts per batch = max_retries + 1
  int retry_initial_delay_ms = 250;  // doubles after each failure
  int timeout_sec = 30;
  std::string cache_path;  // optional on-disk cache, entity -> features
  std::vector<std::string> predicates = kDefaultFeaturePredicates;
};

// Transport or response failure after retries. Carries whatever portion
// completed so the caller can decide what to do with it; nothing is
// committed to the cache beyond fully fetched batches.
struct SparqlError : Error {
  SparqlError(const std::string& what, ItemFeatureMap partial_map, std::size_t done)
      : Error(what), partial(std::move(partial_map)), entities_completed(done) {}

  ItemFeatureMap partial;
  std::size_t entities_completed;
};

// Fetches the same item -> feature sets extract_features would produce from
// the endpoint's triples. Entities are queried in batches; each batch is
// retried with exponential backoff.
ItemFeatureMap fetch_features_sparql(const SparqlOptions& options,
                                     const EntityMapping& mapping,
                                     ExtractStats* stats = nullptr);

// Exposed for testing: the query text sent for one batch of entity IRIs.
std::string sparql_batch_query(const std::vector<std::string>& entities,
                               const std::vector<std::string>& predicates);

}  // namespace semauto

#endif  // SEMAUTO_SPARQL_HPP
