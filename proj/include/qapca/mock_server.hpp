#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace qapca {

/// In-process annealer service implementing the solve wire protocol by
/// delegating to solve_exhaustive (small problems) or solve_sa. Used by the
/// bundled mock-server tool and the integration tests.
class MockServer {
 public:
  /// exhaustive_cap: largest spin count solved exactly; bigger problems go
  /// through simulated annealing.
  explicit MockServer(int exhaustive_cap = 20);
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Starts serving on `port` (0 picks a free port) and returns the bound
  /// port. The server runs on a background thread until stop().
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  /// Blocks until the server stops (e.g. via POST /shutdown).
  void wait();

  int port() const { return port_; }
  std::string base_url() const;

 private:
  int exhaustive_cap_;
  int port_ = 0;
  std::string host_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// Request handler shared by MockServer and tests: maps a solve-request
/// body to a (status, response body) pair.
std::pair<int, std::string> handle_solve_request(const std::string& body, int exhaustive_cap);

}  // namespace qapca
