#include "semauto/sparql.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "semauto/io_util.hpp"

namespace semauto {

namespace {

constexpr std::string_view kCacheHeader = "semauto-sparql-cache v1";

struct Endpoint {
  std::string host_port;  // scheme://host:port for httplib::Client
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  if (url.rfind("https://", 0) == 0) {
    throw ConfigError("https endpoints are not supported by this build; use http");
  }
  if (url.rfind("http://", 0) != 0) {
    throw ConfigError("endpoint URL must start with http://, got: " + url);
  }
  const std::size_t slash = url.find('/', 7);
  Endpoint ep;
  if (slash == std::string::npos) {
    ep.host_port = url;
    ep.path = "/sparql";
  } else {
    ep.host_port = url.substr(0, slash);
    ep.path = url.substr(slash);
  }
  return ep;
}

// entity IRI -> feature IRIs; entities with no features are cached too so a
// resumed run does not refetch them.
using EntityFeatures = std::map<std::string, std::set<std::string>>;

EntityFeatures load_cache(const std::string& path) {
  EntityFeatures cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  if (!std::getline(in, line) || line != kCacheHeader) {
    throw FormatError("bad sparql cache header in " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("bad sparql cache line in " + path);
    auto& feats = cache[line.substr(0, tab)];
    std::istringstream rest(line.substr(tab + 1));
    std::string iri;
    while (rest >> iri) feats.insert(iri);
  }
  return cache;
}

void append_cache(std::ofstream& out, const std::string& entity,
                  const std::set<std::string>& feats) {
  out << entity << '\t';
  bool first = true;
  for (const auto& f : feats) {
    if (!first) out << ' ';
    out << f;
    first = false;
  }
  out << '\n';
  out.flush();
}

}  // namespace

std::string sparql_batch_query(const std::vector<std::string>& entities,
                               const std::vector<std::string>& predicates) {
  std::ostringstream q;
  q << "SELECT ?s ?p ?o WHERE { VALUES ?s {";
  for (const auto& e : entities) q << " <" << e << ">";
  q << " } VALUES ?p {";
  for (const auto& p : predicates) q << " <" << p << ">";
  q << " } ?s ?p ?o . }";
  return q.str();
}

ItemFeatureMap fetch_features_sparql(const SparqlOptions& options,
                                     const EntityMapping& mapping,
                                     ExtractStats* stats) {
  if (options.batch_size < 1) throw ContractViolation("batch_size must be >= 1");
  if (mapping.empty()) throw ContractViolation("entity mapping is empty");

  ExtractStats local;
  ExtractStats& st = stats != nullptr ? *stats : local;
  st = ExtractStats{};

  const Endpoint ep = parse_endpoint(options.endpoint_url);
  const auto entity_items = mapping.by_entity();

  EntityFeatures fetched;
  std::ofstream cache_out;
  if (!options.cache_path.empty()) {
    fetched = load_cache(options.cache_path);
    const bool fresh = fetched.empty();
    cache_out.open(options.cache_path, fresh ? std::ios::trunc : std::ios::app);
    if (!cache_out) throw Error("cannot open sparql cache: " + options.cache_path);
    if (fresh) cache_out << kCacheHeader << "\n" << std::flush;
  }

  std::vector<std::string> pending;
  for (const auto& [iri, _] : entity_items) {
    if (fetched.count(iri) == 0) pending.push_back(iri);
  }

  auto assemble = [&] {
    ItemFeatureMap map;
    for (const auto& [iri, items] : entity_items) {
      auto it = fetched.find(iri);
      if (it == fetched.end() || it->second.empty()) continue;
      for (const ItemId item : items) {
        for (const auto& feat : it->second) map.add_item_feature(item, feat);
      }
    }
    map.canonicalize();
    return map;
  };

  httplib::Client client(ep.host_port);
  client.set_connection_timeout(options.timeout_sec, 0);
  client.set_read_timeout(options.timeout_sec, 0);

  std::size_t done = 0;
  for (std::size_t start = 0; start < pending.size(); start += options.batch_size) {
    const std::size_t end = std::min(start + options.batch_size, pending.size());
    const std::vector<std::string> batch(pending.begin() + start, pending.begin() + end);
    const std::string query = sparql_batch_query(batch, options.predicates);

    httplib::Params params{{"query", query}, {"format", "json"}};
    httplib::Headers headers{{"Accept", "application/sparql-results+json"}};

    nlohmann::json body;
    std::string failure;
    bool ok = false;
    int delay_ms = options.retry_initial_delay_ms;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        delay_ms *= 2;
      }
      auto res = client.Get(ep.path, params, headers);
      if (!res) {
        failure = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        failure = "HTTP status " + std::to_string(res->status);
        continue;
      }
      body = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
      if (body.is_discarded() || !body.contains("results") ||
          !body["results"].contains("bindings")) {
        failure = "malformed SPARQL JSON response";
        continue;
      }
      ok = true;
      break;
    }
    if (!ok) {
      throw SparqlError("sparql fetch failed after " + std::to_string(options.max_retries + 1) +
                            " attempts (" + failure + "); " + std::to_string(done) + " of " +
                            std::to_string(entity_items.size()) + " entities completed",
                        assemble(), done);
    }

    // Record every entity in the batch, including empty results.
    std::map<std::string, std::set<std::string>> batch_feats;
    for (const auto& e : batch) batch_feats[e];
    for (const auto& binding : body["results"]["bindings"]) {
      if (!binding.contains("s") || !binding.contains("o")) continue;
      const auto& s = binding["s"];
      const auto& o = binding["o"];
      if (s.value("type", "") != "uri") continue;
      const std::string subject = s.value("value", "");
      if (batch_feats.count(subject) == 0) continue;
      if (o.value("type", "") != "uri") {
        ++st.non_iri_objects;
        continue;
      }
      batch_feats[subject].insert(o.value("value", ""));
      ++st.matched;
    }

    for (const auto& [entity, feats] : batch_feats) {
      fetched[entity] = feats;
      if (cache_out.is_open()) append_cache(cache_out, entity, feats);
    }
    done += batch.size();
  }

  if (st.matched == 0) {
    // Everything may have come from the cache; count cached features too.
    bool any = false;
    for (const auto& [_, feats] : fetched) {
      if (!feats.empty()) {
        any = true;
        break;
      }
    }
    if (!any) {
      throw Error("empty feature map: endpoint returned no features for any mapped entity");
    }
  }

  ItemFeatureMap map = assemble();
  st.items_without_features = mapping.size() - map.item_count();
  return map;
}

}  // namespace semauto
