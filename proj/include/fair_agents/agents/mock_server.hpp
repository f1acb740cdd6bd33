#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace fair_agents {

// HTTP test double for the adapter service. Serves POST /generate with the
// mock ranking, optionally misbehaving in one of a few scripted ways.
class MockAdapterServer {
 public:
  enum class Fault {
    kNone,
    kMissingItems,     // body without "items"
    kDuplicateField,   // "items" appears twice
    kNonStringIds,     // ids encoded as numbers
    kServerError,      // HTTP 500
    kTooManyItems,     // k + 1 items
  };

  struct Options {
    int ghosts = 0;
    Fault fault = Fault::kNone;
    std::chrono::milliseconds delay{0};
  };

  MockAdapterServer();
  explicit MockAdapterServer(Options options);
  ~MockAdapterServer();

  MockAdapterServer(const MockAdapterServer&) = delete;
  MockAdapterServer& operator=(const MockAdapterServer&) = delete;

  // Binds (port 0 picks a free port), starts serving on a background thread
  // and returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop() is called from elsewhere.
  void listen_blocking(const std::string& host, int port);
  void stop();

  std::string url() const;
  long requests_served() const { return requests_.load(); }

 private:
  void install_handlers();

  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
  std::atomic<long> requests_{0};
};

}  // namespace fair_agents
