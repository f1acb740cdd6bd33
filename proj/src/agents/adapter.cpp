#include "fair_agents/agents/adapter.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/core/hash.hpp"

namespace fair_agents {

using nlohmann::json;

namespace {

// Parses a JSON object and rejects repeated top-level keys, which
// nlohmann::json would otherwise silently collapse.
json parse_object_strict(const std::string& body, const char* what) {
  std::set<std::string> keys;
  bool duplicated = false;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      if (!keys.insert(parsed.get<std::string>()).second) duplicated = true;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(body, cb);
  } catch (const json::parse_error& e) {
    throw AdapterMalformed(std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw AdapterMalformed(std::string(what) + ": body is not an object");
  if (duplicated) throw AdapterMalformed(std::string(what) + ": duplicated field");
  return doc;
}

const json& require(const json& doc, const char* key, const char* what) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw AdapterMalformed(std::string(what) + ": missing field '" + key + "'");
  }
  return *it;
}

}  // namespace

std::string encode_request(const AdapterRequest& request) {
  json candidates = json::array();
  for (const auto& c : request.candidates) {
    candidates.push_back({{"id", c.id}, {"description", c.description}});
  }
  json doc = {{"query_id", request.query_id},
              {"query_text", request.query_text},
              {"persona", request.persona},
              {"candidates", std::move(candidates)},
              {"k", request.k}};
  return doc.dump();
}

AdapterRequest decode_request(const std::string& body) {
  const json doc = parse_object_strict(body, "request");
  AdapterRequest out;
  try {
    out.query_id = require(doc, "query_id", "request").get<std::string>();
    out.query_text = require(doc, "query_text", "request").get<std::string>();
    out.persona = require(doc, "persona", "request").get<std::string>();
    out.k = require(doc, "k", "request").get<int>();
    for (const auto& c : require(doc, "candidates", "request")) {
      out.candidates.push_back(
          {c.at("id").get<std::string>(), c.at("description").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw AdapterMalformed(std::string("request: ") + e.what());
  }
  return out;
}

std::string encode_response(const AdapterResponse& response) {
  json doc = {{"items", response.items}, {"justification", response.justification}};
  return doc.dump();
}

AdapterResponse decode_response(const std::string& body, int k) {
  const json doc = parse_object_strict(body, "response");
  const json& items = require(doc, "items", "response");
  const json& justification = require(doc, "justification", "response");
  if (!items.is_array()) throw AdapterMalformed("response: 'items' is not an array");
  if (!justification.is_string()) {
    throw AdapterMalformed("response: 'justification' is not a string");
  }
  AdapterResponse out;
  for (const auto& id : items) {
    if (!id.is_string()) throw AdapterMalformed("response: non-string item id");
    out.items.push_back(id.get<std::string>());
  }
  if (static_cast<long>(out.items.size()) > k) {
    throw AdapterMalformed("response: more than k items");
  }
  out.justification = justification.get<std::string>();
  return out;
}

AdapterResponse mock_generate(const AdapterRequest& request, int ghosts) {
  struct Keyed {
    std::uint64_t key;
    const std::string* id;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(request.candidates.size());
  for (const auto& c : request.candidates) {
    auto h = fnv1a64(request.query_id);
    h = fnv1a64(c.id, h);
    h = fnv1a64(request.persona, h);
    keyed.push_back({h, &c.id});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.key != b.key ? a.key < b.key : *a.id < *b.id;
  });

  AdapterResponse out;
  const auto k = static_cast<std::size_t>(std::max(request.k, 0));
  const auto n_ghosts = std::min<std::size_t>(static_cast<std::size_t>(std::max(ghosts, 0)), k);
  for (std::size_t g = 0; g < n_ghosts; ++g) {
    out.items.push_back("ghost:" + request.query_id + ":" + std::to_string(g));
  }
  for (const auto& entry : keyed) {
    if (out.items.size() >= k) break;
    out.items.push_back(*entry.id);
  }
  out.justification = "mock ranking by stable hash for persona '" + request.persona + "'";
  return out;
}

AdapterResponse MockAdapter::generate(const AdapterRequest& request) {
  return mock_generate(request, ghosts_);
}

HttpAdapter::HttpAdapter(std::string url, std::chrono::milliseconds deadline)
    : deadline_(deadline) {
  constexpr std::string_view kScheme = "http://";
  std::string_view rest = url;
  if (rest.substr(0, kScheme.size()) != kScheme) {
    throw AdapterUnavailable("adapter url must start with http:// : " + url);
  }
  rest.remove_prefix(kScheme.size());
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  path_ = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    host_ = std::string(authority.substr(0, colon));
    port_ = std::atoi(std::string(authority.substr(colon + 1)).c_str());
  } else {
    host_ = std::string(authority);
  }
  if (host_.empty() || port_ <= 0) throw AdapterUnavailable("bad adapter url: " + url);
}

AdapterResponse HttpAdapter::generate(const AdapterRequest& request) {
  httplib::Client client(host_, port_);
  const auto secs = static_cast<time_t>(deadline_.count() / 1000);
  const auto usecs = static_cast<time_t>((deadline_.count() % 1000) * 1000);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path_ + "/generate", encode_request(request), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= deadline_)) {
      throw AdapterTimeout("adapter did not answer within " +
                           std::to_string(deadline_.count()) + " ms");
    }
    throw AdapterUnavailable("adapter request failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw AdapterMalformed("adapter answered HTTP " + std::to_string(res->status));
  }
  return decode_response(res->body, request.k);
}

std::string resolve_endpoint(const AgentSpec& spec,
                             const std::optional<std::string>& override_url) {
  if (override_url && !override_url->empty()) return *override_url;
  if (const char* env = std::getenv(kAdapterUrlEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return spec.string_param("endpoint").value_or(kMockEndpoint);
}

std::unique_ptr<Adapter> make_adapter(const AgentSpec& spec,
                                      const std::optional<std::string>& override_url) {
  const std::string endpoint = resolve_endpoint(spec, override_url);
  if (endpoint == kMockEndpoint) {
    return std::make_unique<MockAdapter>(
        static_cast<int>(spec.number_param("inject_ghosts").value_or(0.0)));
  }
  const auto deadline = std::chrono::milliseconds(static_cast<long long>(
      spec.number_param("timeout_ms").value_or(static_cast<double>(kDefaultAdapterDeadline.count()))));
  return std::make_unique<HttpAdapter>(endpoint, deadline);
}

Ballot request_external(const AgentSpec& spec, const Query& query,
                        std::span<const Item* const> catalog_slice, int k,
                        const std::optional<std::string>& override_url) {
  if (spec.objective != Objective::kExternal) {
    throw InvalidArgument("request_external: agent '" + spec.agent_id + "' is not external");
  }
  if (k < 1) throw InvalidArgument("candidate count k must be >= 1");

  AdapterRequest request;
  request.query_id = query.id;
  request.query_text = query.text;
  request.persona = spec.string_param("persona").value_or("");
  request.k = k;
  for (const Item* item : catalog_slice) request.candidates.push_back({item->id, item->description});

  auto adapter = make_adapter(spec, override_url);
  AdapterResponse response = adapter->generate(request);

  Ballot ballot;
  ballot.agent_id = spec.agent_id;
  ballot.ranking = std::move(response.items);
  ballot.justification = std::move(response.justification);
  return ballot;
}

}  // namespace fair_agents
