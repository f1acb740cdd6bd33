#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fair_agents/agents/agents.hpp"

namespace fair_agents {

// Environment variable that overrides every external agent's endpoint.
inline constexpr const char* kAdapterUrlEnv = "FAIR_AGENTS_ADAPTER_URL";
// Endpoint value selecting the in-process mock.
inline constexpr const char* kMockEndpoint = "mock";
inline constexpr std::chrono::milliseconds kDefaultAdapterDeadline{10'000};

struct AdapterCandidate {
  std::string id;
  std::string description;
};

// Body of POST /generate.
struct AdapterRequest {
  std::string query_id;
  std::string query_text;
  std::string persona;
  std::vector<AdapterCandidate> candidates;
  int k = 1;
};

// Body of a 200 response.
struct AdapterResponse {
  std::vector<std::string> items;
  std::string justification;
};

std::string encode_request(const AdapterRequest& request);
// Throws AdapterMalformed.
AdapterRequest decode_request(const std::string& body);
std::string encode_response(const AdapterResponse& response);
// Enforces the response schema: exactly-once "items" (array of strings, at most
// k entries) and "justification" (string). Throws AdapterMalformed.
AdapterResponse decode_response(const std::string& body, int k);

// The mock's ranking: candidates ordered by FNV-1a 64 of
// query_id + candidate id + persona (ascending, ties by id), truncated to k.
// With ghosts > 0, the first `ghosts` entries are out-of-catalog ids
// "ghost:<query_id>:<n>" and the list is still k long.
AdapterResponse mock_generate(const AdapterRequest& request, int ghosts = 0);

class Adapter {
 public:
  virtual ~Adapter() = default;
  virtual AdapterResponse generate(const AdapterRequest& request) = 0;
};

class MockAdapter final : public Adapter {
 public:
  explicit MockAdapter(int ghosts = 0) : ghosts_(ghosts) {}
  AdapterResponse generate(const AdapterRequest& request) override;

 private:
  int ghosts_;
};

// Talks to an adapter service over HTTP. `url` is "http://host:port" with an
// optional path prefix; the request goes to <prefix>/generate.
class HttpAdapter final : public Adapter {
 public:
  HttpAdapter(std::string url, std::chrono::milliseconds deadline = kDefaultAdapterDeadline);
  AdapterResponse generate(const AdapterRequest& request) override;

 private:
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::chrono::milliseconds deadline_;
};

// Endpoint resolution: explicit override, then FAIR_AGENTS_ADAPTER_URL, then
// the agent's "endpoint" param, then the mock.
std::string resolve_endpoint(const AgentSpec& spec,
                             const std::optional<std::string>& override_url);

std::unique_ptr<Adapter> make_adapter(const AgentSpec& spec,
                                      const std::optional<std::string>& override_url);

// One round trip to the agent's adapter. Returns the ballot as received; the
// caller grounds it. Throws AdapterTimeout / AdapterMalformed /
// AdapterUnavailable.
Ballot request_external(const AgentSpec& spec, const Query& query,
                        std::span<const Item* const> catalog_slice, int k,
                        const std::optional<std::string>& override_url = std::nullopt);

}  // namespace fair_agents
