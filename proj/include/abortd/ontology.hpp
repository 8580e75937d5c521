#pragma once

#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "abortd/names.hpp"

namespace abortd::ontology {

// Endpoint unreachable or returned a non-success status; callers fall back
// to the cache.
class Unavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Endpoint responded but the body is not SPARQL-JSON.
class ResponseParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kDefaultEndpoint = "https://dbpedia.org/sparql";

// The two query bodies. Perishables: food with ingredients, united with
// fruit and vegetable categories. Utensils: cookware and cooking vessels.
inline constexpr const char* kPerishablesQuery =
    "SELECT DISTINCT ?thing \n"
    "WHERE {\n"
    "    {?thing rdf:type dbo:Food .\n"
    "    ?thing dbo:ingredient ?ingredient .}\n"
    "    UNION {?thing dcterms:subject dbc:Edible_fruits .}\n"
    "    UNION {?thing dcterms:subject dbc:Fruit_vegetables .}\n"
    "    UNION {?thing dcterms:subject dbc:Root_vegetables .}}";

inline constexpr const char* kUtensilsQuery =
    "SELECT DISTINCT ?thing \n"
    "WHERE {\n"
    "    {?thing dcterms:subject dbc:Cookware_and_bakeware .}\n"
    "    UNION\n"
    "    {?thing dcterms:subject dbc:Cooking_vessels .}}";

// The bodies above assume these prefixes; they are prepended on the wire.
inline constexpr const char* kQueryPrefixes =
    "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"
    "PREFIX dbo: <http://dbpedia.org/ontology/>\n"
    "PREFIX dcterms: <http://purl.org/dc/terms/>\n"
    "PREFIX dbc: <http://dbpedia.org/resource/Category:>\n";

struct OntologySets {
  enum class Provenance { Live, Cache };
  std::set<std::string> perishables;  // normalized labels
  std::set<std::string> utensils;
  Provenance provenance = Provenance::Cache;
  std::string source;      // endpoint URL or cache file path
  std::string fetched_at;  // ISO 8601

  bool is_perishable(const std::string& object_name) const {
    return perishables.count(names::to_words(object_name)) > 0;
  }
  bool is_utensil(const std::string& object_name) const {
    return utensils.count(names::to_words(object_name)) > 0;
  }
};

// IRI -> normalized label: last path segment, percent-decoded, underscores
// to spaces, collapsed whitespace, lower case.
inline std::string normalize_label(const std::string& iri) {
  std::string seg = iri;
  auto slash = seg.find_last_of('/');
  if (slash != std::string::npos) seg = seg.substr(slash + 1);

  std::string decoded;
  for (size_t i = 0; i < seg.size(); ++i) {
    if (seg[i] == '%' && i + 2 < seg.size()) {
      auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
      };
      int hi = hex(seg[i + 1]), lo = hex(seg[i + 2]);
      if (hi >= 0 && lo >= 0) {
        decoded.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    decoded.push_back(seg[i]);
  }

  std::string out;
  bool pending_space = false;
  for (char ch : decoded) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (ch == '_' || std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

namespace detail {

inline std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

struct EndpointParts {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading '/'
};

inline EndpointParts split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Unavailable("malformed endpoint URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace detail

// One SPARQL SELECT over HTTP GET, results requested as SPARQL-JSON.
// 10 s timeout, one retry.
inline std::set<std::string> fetch_labels(const std::string& endpoint,
                                          const std::string& query_body) {
  detail::EndpointParts parts = detail::split_endpoint(endpoint);
  std::string query = std::string(kQueryPrefixes) + "\n" + query_body;
  std::string target = parts.path + "?query=" + detail::url_encode(query);

  httplib::Client client(parts.base);
  client.set_connection_timeout(10);
  client.set_read_timeout(10);
  client.set_follow_location(true);

  httplib::Result res;
  for (int attempt = 0; attempt < 2; ++attempt) {
    res = client.Get(target, {{"Accept", "application/sparql-results+json"}});
    if (res) break;
  }
  if (!res)
    throw Unavailable("endpoint unreachable: " + endpoint + " (" +
                      httplib::to_string(res.error()) + ")");
  if (res->status != 200)
    throw Unavailable("endpoint returned HTTP " + std::to_string(res->status));

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw ResponseParseError("non-JSON SPARQL response: " +
                             res->body.substr(0, 200));
  }
  if (!j.contains("results") || !j["results"].contains("bindings"))
    throw ResponseParseError("SPARQL response missing results.bindings: " +
                             res->body.substr(0, 200));

  std::set<std::string> labels;
  for (const auto& binding : j["results"]["bindings"]) {
    if (!binding.contains("thing") || !binding["thing"].contains("value"))
      continue;
    labels.insert(normalize_label(binding["thing"]["value"].get<std::string>()));
  }
  return labels;
}

inline std::set<std::string> fetch_perishables(const std::string& endpoint) {
  return fetch_labels(endpoint, kPerishablesQuery);
}

inline std::set<std::string> fetch_utensils(const std::string& endpoint) {
  return fetch_labels(endpoint, kUtensilsQuery);
}

inline OntologySets read_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw CacheError("ontology cache not readable: " + path +
                     " (run with --endpoint to fetch and create it)");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CacheError("ontology cache corrupt: " + path + ": " + e.what());
  }
  OntologySets sets;
  sets.provenance = OntologySets::Provenance::Cache;
  sets.source = path;
  if (j.contains("fetched_at")) sets.fetched_at = j["fetched_at"];
  for (const auto& p : j.value("perishables", nlohmann::json::array()))
    sets.perishables.insert(p.get<std::string>());
  for (const auto& u : j.value("utensils", nlohmann::json::array()))
    sets.utensils.insert(u.get<std::string>());
  return sets;
}

// Write-temp-then-rename so concurrent readers never see a torn file.
inline void write_cache(const OntologySets& sets, const std::string& path,
                        const std::string& endpoint) {
  nlohmann::ordered_json j;
  j["perishables"] = sets.perishables;
  j["utensils"] = sets.utensils;
  j["fetched_at"] = sets.fetched_at;
  j["endpoint"] = endpoint;
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;  // best effort
    out << j.dump(2) << '\n';
  }
  std::rename(tmp.c_str(), path.c_str());
}

// Live fetch when an endpoint is given (falling back to the cache when the
// endpoint is unavailable), cache-only otherwise.
inline OntologySets load(const std::optional<std::string>& endpoint,
                         const std::string& cache_path) {
  if (endpoint) {
    try {
      auto perishables = std::async(std::launch::async, fetch_perishables,
                                    *endpoint);
      auto utensils = std::async(std::launch::async, fetch_utensils, *endpoint);
      OntologySets sets;
      sets.perishables = perishables.get();
      sets.utensils = utensils.get();
      sets.provenance = OntologySets::Provenance::Live;
      sets.source = *endpoint;
      sets.fetched_at = detail::now_iso8601();
      write_cache(sets, cache_path, *endpoint);
      return sets;
    } catch (const Unavailable&) {
      try {
        return read_cache(cache_path);
      } catch (const CacheError&) {
        throw CacheError("endpoint unavailable and no usable cache at " +
                         cache_path);
      }
    }
  }
  return read_cache(cache_path);
}

}  // namespace abortd::ontology
