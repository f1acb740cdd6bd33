// Standalone mock adapter service, for exercising external agents over HTTP.
//   fair_agents_mock_adapter [--host H] [--port P] [--ghosts N] [--delay-ms D]
#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "fair_agents/agents/mock_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic mock of the adapter service (POST /generate)"};
  std::string host = "127.0.0.1";
  int port = 8089;
  int ghosts = 0;
  int delay_ms = 0;
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));
  app.add_option("--ghosts", ghosts, "Out-of-catalog ids injected per response")->check(CLI::NonNegativeNumber);
  app.add_option("--delay-ms", delay_ms, "Artificial latency per request")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  fair_agents::MockAdapterServer::Options options;
  options.ghosts = ghosts;
  options.delay = std::chrono::milliseconds(delay_ms);
  fair_agents::MockAdapterServer server(options);
  try {
    std::cerr << "mock adapter listening on " << host << ":" << port << "\n";
    server.listen_blocking(host, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
