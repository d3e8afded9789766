#include "semauto/ntriples.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "semauto/io_util.hpp"

namespace semauto {

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

void skip_ws(std::string_view& s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
}

// <...> term; the IRI may not contain whitespace or '>'.
bool take_iri(std::string_view& s, std::string& out) {
  if (s.empty() || s.front() != '<') return false;
  const std::size_t end = s.find('>');
  if (end == std::string_view::npos) return false;
  const std::string_view body = s.substr(1, end - 1);
  if (body.empty() || body.find_first_of(" \t<") != std::string_view::npos) return false;
  out.assign(body);
  s.remove_prefix(end + 1);
  return true;
}

bool take_blank(std::string_view& s, std::string& out) {
  if (s.size() < 3 || s[0] != '_' || s[1] != ':') return false;
  std::size_t end = 2;
  while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
  if (end == 2) return false;
  out.assign(s.substr(0, end));
  s.remove_prefix(end);
  return true;
}

// "..." with backslash escapes, optionally followed by @lang or ^^<type>.
bool take_literal(std::string_view& s, std::string& out) {
  if (s.empty() || s.front() != '"') return false;
  std::size_t i = 1;
  bool escaped = false;
  for (; i < s.size(); ++i) {
    if (escaped) {
      escaped = false;
    } else if (s[i] == '\\') {
      escaped = true;
    } else if (s[i] == '"') {
      break;
    }
  }
  if (i >= s.size()) return false;  // unterminated
  out.assign(s.substr(1, i - 1));
  s.remove_prefix(i + 1);
  if (!s.empty() && s.front() == '@') {
    std::size_t end = 1;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    if (end == 1) return false;
    s.remove_prefix(end);
  } else if (s.size() >= 2 && s[0] == '^' && s[1] == '^') {
    s.remove_prefix(2);
    std::string ignored;
    if (!take_iri(s, ignored)) return false;
  }
  return true;
}

bool parse_line(std::string_view line, Triple& out) {
  skip_ws(line);
  if (line.empty() || line.front() == '#') return false;

  if (take_iri(line, out.subject)) {
    out.subject_kind = TermKind::iri;
  } else if (take_blank(line, out.subject)) {
    out.subject_kind = TermKind::blank;
  } else {
    return false;
  }

  skip_ws(line);
  if (!take_iri(line, out.predicate)) return false;

  skip_ws(line);
  if (take_iri(line, out.object)) {
    out.object_kind = TermKind::iri;
  } else if (take_blank(line, out.object)) {
    out.object_kind = TermKind::blank;
  } else if (take_literal(line, out.object)) {
    out.object_kind = TermKind::literal;
  } else {
    return false;
  }

  skip_ws(line);
  if (line.empty() || line.front() != '.') return false;
  line.remove_prefix(1);
  skip_ws(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

bool NTriplesReader::next(Triple& out) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++lines_;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::string_view probe = line;
    skip_ws(probe);
    if (probe.empty() || probe.front() == '#') continue;  // not an error

    if (parse_line(line, out)) return true;
    ++skipped_;
  }
  return false;
}

ItemFeatureMap extract_features(std::istream& ntriples, const EntityMapping& mapping,
                                const ExtractOptions& options, ExtractStats* stats) {
  ExtractStats local;
  ExtractStats& st = stats != nullptr ? *stats : local;
  st = ExtractStats{};

  const std::unordered_set<std::string> predicates(options.predicates.begin(),
                                                   options.predicates.end());
  std::unordered_map<std::string, std::vector<ItemId>> entity_items;
  for (const auto& [item, iri] : mapping.entries()) entity_items[iri].push_back(item);

  ItemFeatureMap map;
  NTriplesReader reader(ntriples);
  Triple t;
  while (reader.next(t)) {
    ++st.triples;
    if (t.subject_kind != TermKind::iri) continue;
    if (predicates.count(t.predicate) == 0) continue;
    auto it = entity_items.find(t.subject);
    if (it == entity_items.end()) continue;
    if (t.object_kind != TermKind::iri) {
      ++st.non_iri_objects;  // hidden units must be graph nodes
      continue;
    }
    if (!options.type_namespace_filter.empty() && t.predicate == kRdfType &&
        t.object.rfind(options.type_namespace_filter, 0) != 0) {
      ++st.filtered_objects;
      continue;
    }
    for (const ItemId item : it->second) map.add_item_feature(item, t.object);
    ++st.matched;
  }
  st.skipped_lines = reader.skipped();

  if (st.matched == 0) {
    throw Error("empty feature map: no triple matched the chosen predicates for any mapped entity");
  }
  st.items_without_features = mapping.size() - map.item_count();
  map.canonicalize();
  return map;
}

ItemFeatureMap extract_features_from_file(const std::string& path,
                                          const EntityMapping& mapping,
                                          const ExtractOptions& options,
                                          ExtractStats* stats) {
  auto in = open_input(path);
  return extract_features(*in, mapping, options, stats);
}

}  // namespace semauto
