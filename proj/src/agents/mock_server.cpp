#include "fair_agents/agents/mock_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "fair_agents/agents/adapter.hpp"
#include "fair_agents/core/errors.hpp"

namespace fair_agents {

MockAdapterServer::MockAdapterServer() : MockAdapterServer(Options{}) {}

MockAdapterServer::MockAdapterServer(Options options)
    : options_(options), server_(std::make_unique<httplib::Server>()) {
  install_handlers();
}

MockAdapterServer::~MockAdapterServer() { stop(); }

void MockAdapterServer::install_handlers() {
  server_->Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (options_.delay.count() > 0) std::this_thread::sleep_for(options_.delay);

    AdapterRequest request;
    try {
      request = decode_request(req.body);
    } catch (const AdapterMalformed& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
      return;
    }
    AdapterResponse response = mock_generate(request, options_.ghosts);

    std::string body;
    switch (options_.fault) {
      case Fault::kNone:
        body = encode_response(response);
        break;
      case Fault::kMissingItems:
        body = nlohmann::json{{"justification", response.justification}}.dump();
        break;
      case Fault::kDuplicateField:
        body = R"({"items": [], "items": [], "justification": "dup"})";
        break;
      case Fault::kNonStringIds: {
        nlohmann::json ids = nlohmann::json::array();
        for (std::size_t i = 0; i < response.items.size(); ++i) ids.push_back(i);
        body = nlohmann::json{{"items", ids}, {"justification", "numbers"}}.dump();
        break;
      }
      case Fault::kServerError:
        res.status = 500;
        res.set_content("internal error", "text/plain");
        return;
      case Fault::kTooManyItems:
        response.items.assign(static_cast<std::size_t>(request.k) + 1, "x");
        for (std::size_t i = 0; i < response.items.size(); ++i) {
          response.items[i] = "extra-" + std::to_string(i);
        }
        body = encode_response(response);
        break;
    }
    res.status = 200;
    res.set_content(body, "application/json");
  });
}

int MockAdapterServer::start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else if (server_->bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw IoError("mock adapter: cannot bind " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockAdapterServer::listen_blocking(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) throw IoError("mock adapter: cannot listen on " + url());
}

void MockAdapterServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockAdapterServer::url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace fair_agents
